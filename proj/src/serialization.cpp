#include "sparsetrig/serialization.hpp"

#include <cmath>
#include <cstdio>

#include "sparsetrig/errors.hpp"

namespace sparsetrig {

nlohmann::json to_json(const TrigPolynomial& t) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto k = t.frequency(i);
    entries.push_back({{"k", std::vector<int>(k.begin(), k.end())},
                       {"re", t.coeff(i).real()},
                       {"im", t.coeff(i).imag()}});
  }
  return {{"dim", t.dim()}, {"entries", std::move(entries)}};
}

TrigPolynomial trig_polynomial_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<TrigPolynomial::Term> terms;
  for (const auto& e : j.at("entries")) {
    auto k = e.at("k").get<std::vector<int>>();
    if (static_cast<int>(k.size()) != dim) throw DimensionMismatch("trig polynomial json: entry dimension mismatch");
    terms.emplace_back(FrequencyIndex(std::move(k)), Complex(e.at("re").get<double>(), e.at("im").get<double>()));
  }
  return TrigPolynomial::from_terms(dim, std::move(terms));
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) { return fnv1a64(text.data(), text.size()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace sparsetrig
