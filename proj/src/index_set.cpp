#include "sparsetrig/index_set.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "sparsetrig/errors.hpp"

namespace sparsetrig {

namespace {

void compositions_rec(std::vector<int>& s, int j, int remaining,
                      const std::function<void(std::span<const int>)>& fn) {
  const int d = static_cast<int>(s.size());
  if (j == d - 1) {
    s[static_cast<std::size_t>(j)] = remaining;
    fn(s);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    s[static_cast<std::size_t>(j)] = v;
    compositions_rec(s, j + 1, remaining - v, fn);
  }
}

// Values of one coordinate inside dyadic band s.
std::vector<int> band_values(int s) {
  if (s == 0) return {0};
  std::vector<int> out;
  const int lo = 1 << (s - 1);
  const int hi = 1 << s;
  out.reserve(static_cast<std::size_t>(2 * (hi - lo)));
  for (int v = -(hi - 1); v <= -lo; ++v) out.push_back(v);
  for (int v = lo; v < hi; ++v) out.push_back(v);
  return out;
}

void product_rec(const std::vector<std::vector<int>>& axes, std::vector<int>& k,
                 std::size_t j,
                 const std::function<void(std::span<const int>)>& fn) {
  if (j == axes.size()) {
    fn(k);
    return;
  }
  for (int v : axes[j]) {
    k[j] = v;
    product_rec(axes, k, j + 1, fn);
  }
}

void cross_rec(int dim, std::int64_t budget, std::vector<int>& k, int j,
               const std::function<void(std::span<const int>)>& fn) {
  if (j == dim) {
    fn(k);
    return;
  }
  const auto jj = static_cast<std::size_t>(j);
  for (std::int64_t v = -budget; v <= budget; ++v) {
    const std::int64_t f = std::max<std::int64_t>(std::abs(v), 1);
    k[jj] = static_cast<int>(v);
    cross_rec(dim, budget / f, k, j + 1, fn);
  }
}

}  // namespace

void for_each_composition(int dim, int total,
                          const std::function<void(std::span<const int>)>& fn) {
  if (dim < 1 || total < 0) return;
  std::vector<int> s(static_cast<std::size_t>(dim), 0);
  compositions_rec(s, 0, total, fn);
}

void for_each_in_block(std::span<const int> s,
                       const std::function<void(std::span<const int>)>& fn) {
  std::vector<std::vector<int>> axes;
  axes.reserve(s.size());
  for (int sj : s) axes.push_back(band_values(sj));
  std::vector<int> k(s.size(), 0);
  product_rec(axes, k, 0, fn);
}

std::size_t block_cardinality(std::span<const int> s) {
  std::size_t n = 1;
  for (int sj : s) n *= (sj == 0) ? 1u : (std::size_t{1} << sj);
  return n;
}

IndexSet IndexSet::dyadic_block(std::vector<int> s) {
  if (s.empty()) throw std::invalid_argument("dyadic_block: empty s");
  for (int v : s)
    if (v < 0 || v > 30) throw std::invalid_argument("dyadic_block: s out of range");
  IndexSet set(IndexSetKind::DyadicBlock, static_cast<int>(s.size()));
  set.params_ = std::move(s);
  return set;
}

IndexSet IndexSet::step_hyperbolic_cross(int dim, int n) {
  if (dim < 1 || n < 0) throw std::invalid_argument("step_hyperbolic_cross: bad parameters");
  IndexSet set(IndexSetKind::StepHyperbolicCross, dim);
  set.params_ = {n};
  return set;
}

IndexSet IndexSet::layer(int dim, int l) {
  if (dim < 1 || l < 0) throw std::invalid_argument("layer: bad parameters");
  IndexSet set(IndexSetKind::Layer, dim);
  set.params_ = {l};
  return set;
}

IndexSet IndexSet::hyperbolic_cross(int dim, std::int64_t N) {
  if (dim < 1 || N < 1) throw std::invalid_argument("hyperbolic_cross: bad parameters");
  IndexSet set(IndexSetKind::HyperbolicCross, dim);
  set.cross_N_ = N;
  set.params_ = {static_cast<int>(N)};
  return set;
}

IndexSet IndexSet::box(std::vector<int> N) {
  if (N.empty()) throw std::invalid_argument("box: empty N");
  for (int v : N)
    if (v < 0) throw std::invalid_argument("box: negative extent");
  IndexSet set(IndexSetKind::Box, static_cast<int>(N.size()));
  set.params_ = std::move(N);
  return set;
}

IndexSet IndexSet::explicit_set(int dim, std::vector<FrequencyIndex> members) {
  for (const auto& k : members)
    if (k.dim() != dim) throw DimensionMismatch("explicit_set: member dimension mismatch");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  IndexSet set(IndexSetKind::Explicit, dim);
  set.explicit_ = std::move(members);
  return set;
}

std::string IndexSet::describe() const {
  std::ostringstream os;
  auto vec = [&](const std::vector<int>& v) {
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
  };
  switch (kind_) {
    case IndexSetKind::DyadicBlock: os << "rho"; vec(params_); break;
    case IndexSetKind::StepHyperbolicCross: os << "Q" << params_[0]; break;
    case IndexSetKind::Layer: os << "layer" << params_[0]; break;
    case IndexSetKind::HyperbolicCross: os << "Gamma" << cross_N_; break;
    case IndexSetKind::Box: os << "box"; vec(params_); break;
    case IndexSetKind::Explicit: os << "explicit[" << explicit_.size() << "]"; break;
  }
  os << "_d" << dim_;
  return os.str();
}

bool IndexSet::contains(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) throw DimensionMismatch("IndexSet::contains: dimension mismatch");
  switch (kind_) {
    case IndexSetKind::DyadicBlock:
      for (std::size_t j = 0; j < k.size(); ++j)
        if (dyadic_level(k[j]) != params_[j]) return false;
      return true;
    case IndexSetKind::StepHyperbolicCross:
      return dyadic_layer(k) <= params_[0];
    case IndexSetKind::Layer:
      return dyadic_layer(k) == params_[0];
    case IndexSetKind::HyperbolicCross: {
      std::int64_t prod = 1;
      for (int v : k) {
        prod *= std::max<std::int64_t>(std::abs(v), 1);
        if (prod > cross_N_) return false;
      }
      return true;
    }
    case IndexSetKind::Box:
      for (std::size_t j = 0; j < k.size(); ++j)
        if (std::abs(k[j]) > params_[j]) return false;
      return true;
    case IndexSetKind::Explicit:
      return std::binary_search(explicit_.begin(), explicit_.end(), FrequencyIndex(k));
  }
  return false;
}

void IndexSet::for_each(const std::function<void(std::span<const int>)>& fn) const {
  switch (kind_) {
    case IndexSetKind::DyadicBlock:
      for_each_in_block(params_, fn);
      return;
    case IndexSetKind::StepHyperbolicCross:
      for (int l = 0; l <= params_[0]; ++l)
        for_each_composition(dim_, l, [&](std::span<const int> s) { for_each_in_block(s, fn); });
      return;
    case IndexSetKind::Layer:
      for_each_composition(dim_, params_[0], [&](std::span<const int> s) { for_each_in_block(s, fn); });
      return;
    case IndexSetKind::HyperbolicCross: {
      std::vector<int> k(static_cast<std::size_t>(dim_), 0);
      cross_rec(dim_, cross_N_, k, 0, fn);
      return;
    }
    case IndexSetKind::Box: {
      std::vector<std::vector<int>> axes;
      for (int n : params_) {
        std::vector<int> a;
        for (int v = -n; v <= n; ++v) a.push_back(v);
        axes.push_back(std::move(a));
      }
      std::vector<int> k(static_cast<std::size_t>(dim_), 0);
      product_rec(axes, k, 0, fn);
      return;
    }
    case IndexSetKind::Explicit:
      for (const auto& k : explicit_) fn(k.values());
      return;
  }
}

std::vector<FrequencyIndex> IndexSet::members() const {
  std::vector<FrequencyIndex> out;
  for_each([&](std::span<const int> k) { out.emplace_back(k); });
  return out;
}

std::size_t IndexSet::size() const {
  switch (kind_) {
    case IndexSetKind::DyadicBlock:
      return block_cardinality(params_);
    case IndexSetKind::Box: {
      std::size_t n = 1;
      for (int v : params_) n *= static_cast<std::size_t>(2 * v + 1);
      return n;
    }
    case IndexSetKind::Explicit:
      return explicit_.size();
    case IndexSetKind::StepHyperbolicCross:
    case IndexSetKind::Layer: {
      std::size_t n = 0;
      const int lo = kind_ == IndexSetKind::Layer ? params_[0] : 0;
      for (int l = lo; l <= params_[0]; ++l)
        for_each_composition(dim_, l, [&](std::span<const int> s) { n += block_cardinality(s); });
      return n;
    }
    case IndexSetKind::HyperbolicCross: {
      std::size_t n = 0;
      for_each([&](std::span<const int>) { ++n; });
      return n;
    }
  }
  return 0;
}

std::vector<int> IndexSet::max_abs() const {
  std::vector<int> m(static_cast<std::size_t>(dim_), 0);
  switch (kind_) {
    case IndexSetKind::DyadicBlock:
      for (std::size_t j = 0; j < m.size(); ++j)
        m[j] = params_[j] == 0 ? 0 : (1 << params_[j]) - 1;
      return m;
    case IndexSetKind::StepHyperbolicCross:
    case IndexSetKind::Layer:
      std::fill(m.begin(), m.end(), params_[0] == 0 ? 0 : (1 << params_[0]) - 1);
      return m;
    case IndexSetKind::HyperbolicCross:
      std::fill(m.begin(), m.end(), static_cast<int>(cross_N_));
      return m;
    case IndexSetKind::Box:
      return params_;
    case IndexSetKind::Explicit:
      for (const auto& k : explicit_)
        for (int j = 0; j < dim_; ++j)
          m[static_cast<std::size_t>(j)] = std::max(m[static_cast<std::size_t>(j)], std::abs(k[j]));
      return m;
  }
  return m;
}

}  // namespace sparsetrig
