#pragma once

#include <bit>
#include <compare>
#include <cstdlib>
#include <initializer_list>
#include <span>
#include <vector>

namespace sparsetrig {

// Integer frequency vector k in Z^d indexing e^{i(k,x)}.
class FrequencyIndex {
 public:
  FrequencyIndex() = default;
  explicit FrequencyIndex(std::vector<int> k) : k_(std::move(k)) {}
  FrequencyIndex(std::initializer_list<int> k) : k_(k) {}
  explicit FrequencyIndex(std::span<const int> k) : k_(k.begin(), k.end()) {}

  int dim() const { return static_cast<int>(k_.size()); }
  int operator[](int j) const { return k_[static_cast<std::size_t>(j)]; }
  int& operator[](int j) { return k_[static_cast<std::size_t>(j)]; }
  std::span<const int> values() const { return k_; }

  FrequencyIndex operator-() const {
    FrequencyIndex r(*this);
    for (auto& v : r.k_) v = -v;
    return r;
  }

  // Lexicographic, total.
  friend auto operator<=>(const FrequencyIndex&, const FrequencyIndex&) = default;
  friend bool operator==(const FrequencyIndex&, const FrequencyIndex&) = default;

 private:
  std::vector<int> k_;
};

// Dyadic band of one coordinate: the s with [2^{s-1}] <= |k| < 2^s.
inline int dyadic_level(int k) {
  return static_cast<int>(std::bit_width(static_cast<unsigned>(std::abs(k))));
}

inline int l1_norm(std::span<const int> v) {
  int s = 0;
  for (int x : v) s += std::abs(x);
  return s;
}

// ||s||_1 of the dyadic block containing k.
inline int dyadic_layer(std::span<const int> k) {
  int l = 0;
  for (int x : k) l += dyadic_level(x);
  return l;
}

inline std::vector<int> dyadic_block_of(std::span<const int> k) {
  std::vector<int> s(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) s[j] = dyadic_level(k[j]);
  return s;
}

}  // namespace sparsetrig
