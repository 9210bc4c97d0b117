#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "sparsetrig/errors.hpp"
#include "sparsetrig/grid_function.hpp"
#include "sparsetrig/index_set.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/sparse_grid.hpp"
#include "test_helpers.hpp"

using namespace sparsetrig;
using sparsetrig::testing::random_real_on;

namespace {

constexpr double kPi = std::numbers::pi;

// Knots as doubles rounded to a lattice far finer than any grid used here.
std::set<std::vector<long long>> float_keys(const KnotSet& X) {
  std::set<std::vector<long long>> keys;
  for (const auto& k : X.knots()) {
    std::vector<long long> key;
    for (double x : k.x) key.push_back(std::llround(x / kPi * (1 << 20)));
    keys.insert(key);
  }
  return keys;
}

// Brute-force half-period sparse grid from the definition.
std::set<std::vector<long long>> brute_half_grid(int n, int d) {
  std::set<std::vector<long long>> keys;
  for_each_composition(d, n, [&](std::span<const int> nv) {
    std::vector<long long> k(static_cast<std::size_t>(d), 0);
    for (;;) {
      std::vector<long long> key;
      for (int j = 0; j < d; ++j) key.push_back(std::llround(kPi * k[j] / std::ldexp(1.0, nv[j]) / kPi * (1 << 20)));
      keys.insert(key);
      int j = d - 1;
      while (j >= 0 && ++k[j] == (1LL << nv[j])) k[j--] = 0;
      if (j < 0) break;
    }
  });
  return keys;
}

}  // namespace

TEST_CASE("Fejer kernels") {
  const auto one = fejer_kernel(1, 2);
  CHECK(one.size() == 1);
  CHECK(one.at(FrequencyIndex{0, 0}) == Complex(1.0, 0.0));
  const auto k4 = fejer_kernel(4, 1);
  CHECK(k4.size() == 7);
  for (int k = -3; k <= 3; ++k) CHECK(k4.at(FrequencyIndex{k}).real() == doctest::Approx(1.0 - std::abs(k) / 4.0));
  CHECK(k4.at(FrequencyIndex{4}) == Complex(0.0, 0.0));

  for (int N : {1, 2, 5, 16, 33}) {
    const auto K = fejer_kernel(N, 1);
    const auto g = sample(K, {1024});
    double mn = INFINITY, worst = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
      const double x = 2.0 * kPi * static_cast<double>(i) / 1024.0;
      worst = std::max(worst, std::abs(g[i].real() - fejer_closed_form(N, x)));
      mn = std::min(mn, g[i].real());
    }
    CHECK(worst <= 1e-10 * N);
    CHECK(mn >= -1e-12);
    CHECK(grid_norm(g, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int N = 8; N <= 256; N *= 2) {
    const auto K = fejer_kernel(N, 1);
    CHECK(norm_value(K, Exponent::sup()) / N == doctest::Approx(1.0).epsilon(1e-9));
    for (double q : {2.0, 4.0}) {
      const double r = norm_value(K, Exponent::lp(q)) / std::pow(N, 1.0 - 1.0 / q);
      CHECK(r >= 0.2);
      CHECK(r <= 1.0 + 1e-9);
    }
    // closed form for q = 2: ||K_N||_2^2 = sum (1 - |k|/N)^2 = (2N^2 + 1) / (3N)
    CHECK(l2_norm(K) == doctest::Approx(std::sqrt((2.0 * N * N + 1.0) / (3.0 * N))).epsilon(1e-12));
  }
  // multivariate: unit L1 norm, L_q norm ~ theta^{1 - 1/q} with theta = prod N_j
  for (const std::vector<int>& N : {std::vector<int>{4, 8}, std::vector<int>{16, 2}, std::vector<int>{8, 8}}) {
    const auto K = fejer_kernel(N);
    const auto g = sample(K, quadrature_grid(K.max_abs_frequency()));
    CHECK(grid_norm(g, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double theta = static_cast<double>(N[0]) * N[1];
    const double r = norm_value(K, Exponent::lp(2.0)) / std::sqrt(theta);
    CHECK(r >= 0.2 * 0.2);
    CHECK(r <= 1.0 + 1e-9);
  }
  CHECK_THROWS(fejer_kernel(0, 1));
}

TEST_CASE("sparse grids") {
  for (int n = 0; n <= 6; ++n) {
    const auto X = sparse_grid(n, 1);
    CHECK(X.size() == (std::size_t{1} << n));
    CHECK(X.all_exact());
  }
  // d = 2, n = 2: union of the (0,2), (1,1), (2,0) grids
  const auto X2 = sparse_grid(2, 2);
  CHECK(float_keys(X2) == brute_half_grid(2, 2));
  CHECK(X2.size() == 8);  // 4 + 4 + 4 minus the shared points
  for (int d = 2; d <= 3; ++d)
    for (int n = 0; n <= 6; ++n) CHECK(float_keys(sparse_grid(n, d)) == brute_half_grid(n, d));

  // exact web membership against the float test
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 6; ++n)
      for (auto period : {GridPeriod::Half, GridPeriod::Full}) {
        const auto X = sparse_grid(n, d, {period, false, false});
        for_each_composition(d, n, [&](std::span<const int> s) {
          const Web w{std::vector<int>(s.begin(), s.end())};
          for (const auto& k : X.knots()) {
            CHECK(w.contains(k));
            CHECK(std::abs(w.value(k.x)) < 1e-9);
          }
        });
      }
  // the exact test detects points off a web
  const Knot off = Knot::dyadic({BigInt(1), BigInt(3)}, {3, 2});
  CHECK_FALSE((Web{{2, 1}}.contains(off)));
  CHECK((Web{{3, 0}}.contains(off)));
  CHECK((Web{{0, 2}}.contains(off)));
  CHECK(std::abs((Web{{2, 1}}.value(off.x))) > 0.1);

  // size ~ 2^n n^{d-1}, both composition conventions
  for (int d = 2; d <= 3; ++d) {
    double lo = INFINITY, hi = 0.0;
    for (int n = 4; n <= 10; ++n) {
      const auto X = sparse_grid(n, d);
      const auto Xp = sparse_grid(n, d, {GridPeriod::Half, true, false});
      CHECK(Xp.size() <= X.size());
      const double r = X.size() / (std::exp2(n) * std::pow(n, d - 1));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo <= 4.0);
  }
  // reduced storage
  const auto X3 = sparse_grid(3, 1);
  CHECK(X3[0].num[0] == 0);
  CHECK(X3[0].den_pow[0] == 0);
  CHECK(X3[4].num[0] == 1);
  CHECK(X3[4].den_pow[0] == 1);  // pi / 2
}

TEST_CASE("nets") {
  for (int n = 1; n <= 6; ++n) {
    const auto X = sparse_grid(n, 2);
    for (int l = 0; l <= 3; ++l) CHECK(is_nl_net(X, n, l).is_net);
    // 2^l points off every web
    for (int l = 1; l <= 4; ++l) {
      KnotSet Y = X;
      for (int i = 0; i < (1 << l); ++i) Y.add(Knot::real({std::sqrt(2.0) + 0.37 * i, std::numbers::e + 0.11 * i}));
      const auto at = is_nl_net(Y, n, l);
      const auto below = is_nl_net(Y, n, l - 1);
      CHECK(at.is_net);
      CHECK(at.approximate);
      CHECK_FALSE(below.is_net);
      CHECK(below.witness_count == (1 << l));
      CHECK(below.witness.size() == 2);
    }
  }
  KnotSet single(2);
  single.add(Knot::real({kPi / 3, kPi / 3}));
  for (int n = 0; n <= 5; ++n) {
    const auto rep = is_nl_net(single, n, 0);
    CHECK(rep.is_net);
    CHECK(rep.witness_count == 1);
  }
}

TEST_CASE("Smolyak cubature") {
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 6; ++n) {
      const auto X = smolyak_cubature(n, d);
      double sum = 0.0;
      for (double w : X.weights()) sum += w;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(float_keys(X) == float_keys(sparse_grid(n, d, {GridPeriod::Full, false, false})));
      CHECK(cubature(TrigPolynomial::constant(d, 2.5), X) == doctest::Approx(2.5));
    }
  // d = 1 is the rectangle rule: exact on T(2^{n-1} - 1), wrong at 2^n
  for (int n = 1; n <= 6; ++n) {
    const auto X = smolyak_cubature(n, 1);
    for (double w : X.weights()) CHECK(w == std::ldexp(1.0, -n));
    for (int k = 1; k < (1 << n); ++k)
      CHECK(std::abs(cubature(TrigPolynomial::monomial(FrequencyIndex{k}), X)) < 1e-12);
    CHECK(cubature(TrigPolynomial::monomial(FrequencyIndex{1 << n}), X) == doctest::Approx(1.0));
  }
  // exact on T(Q_n), hence on T(Q_{n-d}); first failures just outside
  for (int n = 0; n <= 6; ++n) {
    const auto X = smolyak_cubature(n, 2);
    IndexSet::step_hyperbolic_cross(2, n).for_each([&](std::span<const int> k) {
      const double expect = (k[0] == 0 && k[1] == 0) ? 1.0 : 0.0;
      CHECK(std::abs(cubature(TrigPolynomial::monomial(FrequencyIndex(k)), X) - expect) < 1e-12);
      CHECK(smolyak_on_exponential(n, k) == expect);
    });
    const FrequencyIndex outside{1 << n, 0};
    CHECK(std::abs(cubature(TrigPolynomial::monomial(outside), X)) > 0.5);
  }
  // coefficient-domain rule equals the knot rule
  for (int n = 2; n <= 7; ++n) {
    const auto X = smolyak_cubature(n, 2);
    const auto f = random_real_on(IndexSet::step_hyperbolic_cross(2, n + 3), static_cast<std::uint64_t>(n));
    CHECK(cubature(f, X) == doctest::Approx(smolyak_cubature_fast(f, n)).epsilon(1e-11));
    const auto rule = rule_functional(X);
    for (std::size_t i = 0; i < f.size(); i += 17)
      CHECK(std::abs(rule(f.frequency(i)) - smolyak_on_exponential(n, f.frequency(i))) < 1e-11);
  }
  // pointwise fallback for float knots agrees with the FFT path
  {
    const auto X = smolyak_cubature(4, 2);
    KnotSet Y(2);
    for (const auto& k : X.knots()) Y.add(Knot::real(k.x));
    Y.set_weights(X.weights());
    const auto f = random_real_on(IndexSet::step_hyperbolic_cross(2, 6), 3);
    CHECK(cubature(f, Y) == doctest::Approx(cubature(f, X)).epsilon(1e-11));
    const auto rx = rule_functional(X), ry = rule_functional(Y);
    for (std::size_t i = 0; i < f.size(); i += 11) CHECK(std::abs(rx(f.frequency(i)) - ry(f.frequency(i))) < 1e-10);
  }
  CHECK_THROWS(cubature(TrigPolynomial::constant(2, 1.0), sparse_grid(2, 2)));
}

TEST_CASE("class cubature error") {
  // Q_0 holds only the constant
  const auto X = smolyak_cubature(3, 2);
  const auto st0 = class_cubature_error(ClassSpec::H(1.5, 2.0, 2), X, 0, {1, 2, 3});
  CHECK(st0.max < 1e-14);
  CHECK(st0.lower_estimate);

  const auto spec = ClassSpec::H(1.5, 2.0, 2);
  const auto rule = rule_functional(X);
  for (std::uint64_t seed : {1u, 2u}) {
    const auto s = rule_aligned_sample(spec, 7, seed, rule);
    CHECK(class_norm(s.f, spec) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.f.is_real(1e-14));
    const auto base = sample_class(spec, IndexSet::step_hyperbolic_cross(2, 7), seed);
    const auto bn = block_norms(base.f, 2.0), an = block_norms(s.f, 2.0);
    REQUIRE(bn.size() == an.size());
    for (const auto& [blk, v] : bn) CHECK(an.at(blk) == doctest::Approx(v).epsilon(1e-12));
  }
  const auto rnd = class_cubature_error(spec, X, 7, {1, 2, 3});
  const auto aln = class_cubature_error(spec, X, 7, {1, 2, 3}, ClassSampling::RuleAligned);
  CHECK(aln.max > rnd.max);
  CHECK(aln.errors.size() == 3);
  CHECK(aln.median <= aln.max);
  CHECK_THROWS_AS(rule_aligned_sample(ClassSpec::W(1.5, 2.0, 2), 5, 1, rule), RegimeError);
}

TEST_CASE("recovery") {
  for (const std::vector<int>& levels : {std::vector<int>{4}, std::vector<int>{3, 2}, std::vector<int>{0, 3}}) {
    const auto sys = dirichlet_cardinals(levels);
    const int d = static_cast<int>(levels.size());
    std::size_t count = 1;
    for (int l : levels) count <<= l;
    REQUIRE(sys.psis.size() == count);
    // cardinal on the knots
    for (std::size_t j = 0; j < count; ++j) {
      const auto vals = evaluate_at(sys.psis[j], sys.knots);
      for (std::size_t i = 0; i < count; ++i) CHECK(std::abs(vals[i] - Complex(i == j ? 1.0 : 0.0, 0.0)) < 1e-12);
    }
    // reproduces T(2^{levels - 1} - 1)
    std::vector<int> box;
    for (int l : levels) box.push_back(l == 0 ? 0 : (1 << (l - 1)) - 1);
    const auto f = random_real_on(IndexSet::box(box), 7);
    CHECK(max_coeff_diff(recovery_apply(f, sys.knots, sys.psis), f) < 1e-12);
    // span of the psis
    TrigPolynomial g(d);
    for (std::size_t j = 0; j < count; ++j) g += sys.psis[j] * Complex(std::cos(1.0 + j), 0.0);
    CHECK(max_coeff_diff(recovery_apply(g, sys.knots, sys.psis), g) < 1e-8);
    // zero functions
    std::vector<TrigPolynomial> zeros(count, TrigPolynomial(d));
    CHECK(recovery_apply(f, sys.knots, zeros).empty());
  }
  const auto sys = dirichlet_cardinals({3, 3});
  std::vector<TrigPolynomial> zeros(sys.psis.size(), TrigPolynomial(2));
  const auto st = recovery_error(ClassSpec::H(1.0, 2.0, 2), sys.knots, zeros, 2.0, 4, {5});
  const auto s5 = sample_class(ClassSpec::H(1.0, 2.0, 2), IndexSet::step_hyperbolic_cross(2, 4), 5);
  CHECK(st.max == doctest::Approx(l2_norm(s5.f)));
  const auto st2 = recovery_error(ClassSpec::H(1.0, 2.0, 2), sys.knots, sys.psis, 2.0, 4, {5, 6});
  CHECK(st2.max < st.max);
  CHECK_THROWS(recovery_apply(s5.f, sys.knots, std::vector<TrigPolynomial>(3, TrigPolynomial(2))));
}

TEST_CASE("knot set JSON") {
  KnotSet X = smolyak_cubature(3, 2);
  KnotSet Y(2);
  for (const auto& k : X.knots()) Y.add(k);
  Y.add(Knot::dyadic({BigInt("123456789012345678901234567890"), BigInt(0)}, {100, 4}));
  Y.add(Knot::real({0.25, 1.75}));
  std::vector<double> w = X.weights();
  w.push_back(0.0);
  w.push_back(0.0);
  Y.set_weights(w);
  const auto j = Y.to_json();
  const auto back = KnotSet::from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.size() == Y.size());
  CHECK(back.weights() == Y.weights());
  for (std::size_t i = 0; i < Y.size(); ++i) {
    CHECK(back[i].num == Y[i].num);
    CHECK(back[i].den_pow == Y[i].den_pow);
    CHECK(back[i].x == Y[i].x);
  }
  CHECK(j["points"][Y.size() - 2]["num"][0].is_string());
  CHECK(Y[Y.size() - 2].den_pow[1] == 0);  // zero numerator normalized
}
