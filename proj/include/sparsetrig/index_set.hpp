#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparsetrig/frequency.hpp"

namespace sparsetrig {

enum class IndexSetKind {
  DyadicBlock,
  StepHyperbolicCross,
  HyperbolicCross,
  Box,
  Layer,
  Explicit
};

// Finite frequency set, enumerated lazily.
//
// DyadicBlock(s)         rho(s) = {k : [2^{s_j-1}] <= |k_j| < 2^{s_j}}
// StepHyperbolicCross(n) Q_n = union of rho(s) over ||s||_1 <= n
// Layer(l)               union of rho(s) over ||s||_1 == l
// HyperbolicCross(N)     Gamma(N) = {k : prod max(|k_j|,1) <= N}
// Box(N)                 Pi(N,d) = {k : |k_j| <= N_j}
class IndexSet {
 public:
  static IndexSet dyadic_block(std::vector<int> s);
  static IndexSet step_hyperbolic_cross(int dim, int n);
  static IndexSet layer(int dim, int l);
  static IndexSet hyperbolic_cross(int dim, std::int64_t N);
  static IndexSet box(std::vector<int> N);
  static IndexSet explicit_set(int dim, std::vector<FrequencyIndex> members);

  int dim() const { return dim_; }
  IndexSetKind kind() const { return kind_; }
  std::string describe() const;

  bool contains(std::span<const int> k) const;

  // Visits every member once; order is deterministic for a given set.
  void for_each(const std::function<void(std::span<const int>)>& fn) const;
  std::vector<FrequencyIndex> members() const;
  std::size_t size() const;

  // Componentwise max |k_j| over the members (zero vector when empty).
  std::vector<int> max_abs() const;

  // Parameters as constructed (s, n, l, N or the box vector).
  const std::vector<int>& params() const { return params_; }
  std::int64_t cross_size() const { return cross_N_; }

 private:
  IndexSet(IndexSetKind kind, int dim) : kind_(kind), dim_(dim) {}

  IndexSetKind kind_;
  int dim_;
  std::vector<int> params_;
  std::int64_t cross_N_ = 0;
  std::vector<FrequencyIndex> explicit_;
};

// Enumerates every s in N_0^d with ||s||_1 == total.
void for_each_composition(int dim, int total,
                          const std::function<void(std::span<const int>)>& fn);

// Members of one dyadic block, enumerated directly.
void for_each_in_block(std::span<const int> s,
                       const std::function<void(std::span<const int>)>& fn);

std::size_t block_cardinality(std::span<const int> s);

}  // namespace sparsetrig
