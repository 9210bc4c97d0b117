#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

// {dim, entries: [{k: [...], re, im}]}, entries sorted lexicographically by k.
nlohmann::json to_json(const TrigPolynomial& t);
TrigPolynomial trig_polynomial_from_json(const nlohmann::json& j);

// Shortest round-trip text for CSV cells: %.17g, with "inf", "-inf", "nan".
std::string format_number(double v);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t h = 1469598103934665603ull);
std::uint64_t fnv1a64(std::string_view text);
// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

}  // namespace sparsetrig
