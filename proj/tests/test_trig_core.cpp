#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sparsetrig/errors.hpp"
#include "sparsetrig/grid_function.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/serialization.hpp"
#include "test_helpers.hpp"

using namespace sparsetrig;
using sparsetrig::testing::random_on;
using sparsetrig::testing::random_real_on;

namespace {

TrigPolynomial fejer_by_hand(int N) {
  std::vector<TrigPolynomial::Term> terms;
  for (int k = -(N - 1); k <= N - 1; ++k)
    terms.emplace_back(FrequencyIndex{k}, 1.0 - std::abs(k) / static_cast<double>(N));
  return TrigPolynomial::from_terms(1, terms);
}

// Closed form sin^2(Nx/2) / (N sin^2(x/2)), N at x = 0.
double fejer_closed(int N, double x) {
  const double s = std::sin(x / 2.0);
  if (std::abs(s) < 1e-14) return N;
  const double num = std::sin(N * x / 2.0);
  return num * num / (N * s * s);
}

}  // namespace

TEST_CASE("sample: constant and cosine") {
  auto one = TrigPolynomial::constant(1, 1.0);
  auto g = sample(one, {8});
  for (std::size_t i = 0; i < g.total(); ++i) CHECK(std::abs(g[i] - Complex(1.0)) < 1e-15);

  auto c = TrigPolynomial::from_terms(1, {{FrequencyIndex{1}, 0.5}, {FrequencyIndex{-1}, 0.5}});
  auto gc = sample(c, {8});
  for (std::size_t i = 0; i < gc.total(); ++i) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(i) / 8.0;
    CHECK(std::abs(gc[i] - Complex(std::cos(x))) < 1e-15);
  }
}

TEST_CASE("sample matches direct summation and analyze inverts it on Gamma(8)") {
  auto set = IndexSet::hyperbolic_cross(2, 8);
  auto t = random_on(set, 11);
  auto g = sample(t, {64, 64});
  double worst = 0.0;
  for (std::size_t i = 0; i < g.total(); i += 7) {
    auto x = g.node(i);
    worst = std::max(worst, std::abs(g[i] - t.evaluate(x)));
  }
  CHECK(worst < 1e-11);
  auto back = analyze(g, set);
  CHECK(back.size() == t.size());
  CHECK(max_coeff_diff(back, t) < 1e-12);
}

TEST_CASE("analyze: constants, monomials, Fejér samples") {
  auto g = GridFunction(std::vector<int>{4}, std::vector<Complex>(4, 1.0));
  auto t = analyze(g, IndexSet::box({1}));
  CHECK(t.size() == 1);
  CHECK(std::abs(t.at(FrequencyIndex{0}) - Complex(1.0)) < 1e-15);

  auto mono = GridFunction::zeros({16, 16});
  for (std::size_t i = 0; i < mono.total(); ++i) {
    auto x = mono.node(i);
    const double ph = 3 * x[0] - 2 * x[1];
    mono.samples()[i] = Complex(std::cos(ph), std::sin(ph));
  }
  auto m = analyze(mono, IndexSet::box({7, 7}));
  CHECK(std::abs(m.at(FrequencyIndex{3, -2}) - Complex(1.0)) < 1e-13);
  double off = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (FrequencyIndex(m.frequency(i)) != FrequencyIndex{3, -2}) off = std::max(off, std::abs(m.coeff(i)));
  CHECK(off < 1e-13);

  auto fg = GridFunction::zeros({32});
  for (std::size_t i = 0; i < fg.total(); ++i) fg.samples()[i] = fejer_closed(8, fg.node(i)[0]);
  auto fk = analyze(fg, IndexSet::box({8}));
  for (int k = -8; k <= 8; ++k) {
    const double expected = std::abs(k) < 8 ? 1.0 - std::abs(k) / 8.0 : 0.0;
    CHECK(std::abs(fk.at(FrequencyIndex{k}) - Complex(expected)) < 1e-13);
  }
}

TEST_CASE("sample and analyze refuse aliasing") {
  auto t = TrigPolynomial::monomial(FrequencyIndex{4});
  CHECK_THROWS_AS(sample(t, {8}), AliasingError);
  CHECK_NOTHROW(sample(t, {8}, Sampling::AllowAliasing));
  CHECK_THROWS_AS(sample(t, {8, 8}), DimensionMismatch);
  auto g = GridFunction::zeros({8});
  CHECK_THROWS_AS(analyze(g, IndexSet::box({4})), AliasingError);
}

TEST_CASE("delta_s picks dyadic blocks") {
  auto t = TrigPolynomial::from_terms(
      1, {{FrequencyIndex{0}, 1.0}, {FrequencyIndex{1}, 2.0}, {FrequencyIndex{-1}, 2.0}, {FrequencyIndex{2}, 5.0}});
  auto b1 = delta_s(t, std::vector<int>{1});
  CHECK(b1 == TrigPolynomial::from_terms(1, {{FrequencyIndex{1}, 2.0}, {FrequencyIndex{-1}, 2.0}}));
  auto b0 = delta_s(t, std::vector<int>{0});
  CHECK(b0 == TrigPolynomial::constant(1, 1.0));
}

TEST_CASE("dyadic blocks partition Q_5 exactly") {
  auto t = random_on(IndexSet::step_hyperbolic_cross(2, 5), 3);
  TrigPolynomial sum(2);
  std::size_t terms = 0;
  for (int l = 0; l <= 5; ++l)
    for_each_composition(2, l, [&](std::span<const int> s) {
      auto part = delta_s(t, s);
      terms += part.size();
      sum += part;
    });
  CHECK(terms == t.size());  // disjoint supports
  CHECK(sum == t);
}

TEST_CASE("layer and hyperbolic partial sums") {
  auto block = random_on(IndexSet::dyadic_block({1, 2}), 5);
  CHECK(layer(block, 3) == block);
  CHECK(layer(block, 2).empty());

  auto t = random_on(IndexSet::step_hyperbolic_cross(2, 6), 8);
  TrigPolynomial sum(2);
  for (int l = 0; l <= 6; ++l) sum += layer(t, l);
  CHECK(sum == t);

  CHECK(hyperbolic_partial_sum(t, 40) == t);
  auto s0 = hyperbolic_partial_sum(t, 0);
  CHECK(s0.size() == 1);
  CHECK(s0.at(FrequencyIndex{0, 0}) == t.at(FrequencyIndex{0, 0}));

  for (int n = 0; n <= 6; ++n) {
    auto sn = hyperbolic_partial_sum(t, n);
    auto q = IndexSet::step_hyperbolic_cross(2, n);
    for (std::size_t i = 0; i < sn.size(); ++i) CHECK(q.contains(sn.frequency(i)));
    TrigPolynomial rebuilt = sn;
    for (int l = n + 1; l <= 6; ++l) rebuilt += layer(t, l);
    CHECK(rebuilt == t);
  }
}

TEST_CASE("block cardinality matches the literal bracket definition") {
  // Literal definition per coordinate: floor(2^{s-1}) <= |k| < 2^s.
  auto literal_count = [](int s) {
    const auto lo = static_cast<long>(std::floor(std::ldexp(1.0, s - 1)));
    const long hi = 1L << s;
    long c = 0;
    for (long k = -hi; k <= hi; ++k)
      if (std::abs(k) >= lo && std::abs(k) < hi) ++c;
    return c;
  };
  for (int d = 1; d <= 3; ++d)
    for (int l = 0; l <= 12; ++l)
      for_each_composition(d, l, [&](std::span<const int> s) {
        std::size_t enumerated = 0;
        std::vector<int> sv(s.begin(), s.end());
        auto set = IndexSet::dyadic_block(sv);
        set.for_each([&](std::span<const int> k) {
          enumerated++;
          REQUIRE(set.contains(k));
        });
        long literal = 1;
        for (int sj : s) literal *= literal_count(sj);
        CHECK(static_cast<long>(enumerated) == literal);
        CHECK(set.size() == enumerated);
        if (*std::min_element(s.begin(), s.end()) >= 1) CHECK(enumerated == (std::size_t{1} << l));
      });
}

TEST_CASE("index set membership agrees with enumeration") {
  auto check = [](const IndexSet& set, int R) {
    std::size_t inside = 0;
    std::vector<int> k(static_cast<std::size_t>(set.dim()));
    std::function<void(int)> rec = [&](int j) {
      if (j == set.dim()) {
        if (set.contains(k)) ++inside;
        return;
      }
      for (int v = -R; v <= R; ++v) {
        k[static_cast<std::size_t>(j)] = v;
        rec(j + 1);
      }
    };
    rec(0);
    CHECK(inside == set.size());
    CHECK(set.members().size() == set.size());
  };
  check(IndexSet::hyperbolic_cross(2, 12), 13);
  check(IndexSet::step_hyperbolic_cross(2, 4), 16);
  check(IndexSet::layer(3, 3), 8);
  check(IndexSet::box({2, 3}), 4);
}

TEST_CASE("norms: constants, cosine, Fejér") {
  auto c3 = TrigPolynomial::constant(2, 3.0);
  for (double p : {1.5, 2.0, 3.0, 7.0}) CHECK(std::abs(norm(c3, Exponent::lp(p)).value - 3.0) < 1e-12);
  CHECK(norm(c3, Exponent::sup()).value == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(norm(c3, Exponent::a()).value == 3.0);

  auto cosx = TrigPolynomial::from_terms(1, {{FrequencyIndex{1}, 0.5}, {FrequencyIndex{-1}, 0.5}});
  CHECK(std::abs(norm(cosx, Exponent::l2_exact()).value - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(norm(cosx, Exponent::lp(2.0)).value - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(norm(cosx, Exponent::a()).value == 1.0);

  for (int N : {4, 8, 32}) {
    auto K = fejer_by_hand(N);
    const double one = grid_norm(sample(K, quadrature_grid(K.max_abs_frequency())), 1.0);
    CHECK(std::abs(one - 1.0) < 1e-12);
    auto sup = norm(K, Exponent::sup());
    CHECK(sup.lower_bound);
    CHECK(std::abs(sup.value - N) < 1e-9 * N);
  }
  CHECK_THROWS(Exponent::lp(1.0));
  CHECK_THROWS(Exponent::lp(0.5));
}

TEST_CASE("Parseval agreement and power-mean monotonicity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = random_on(IndexSet::hyperbolic_cross(2, 16), 100 + seed);
    const double exact = l2_norm(t);
    const auto quad = norm(t, Exponent::lp(2.0));
    CHECK(std::abs(exact - quad.value) <= 1e-10 * exact);
    CHECK(quad.error_estimate <= 1e-10 * exact);
    double prev = 0.0;
    for (double p : {1.5, 2.0, 3.0, 4.0, 8.0}) {
      const double v = norm(t, Exponent::lp(p), {4, false}).value;
      CHECK(v >= prev * (1 - 1e-12));
      prev = v;
    }
    CHECK(norm(t, Exponent::sup(), {4, false}).value >= prev * (1 - 1e-12));
  }
}

TEST_CASE("A-norm over Gamma(N) stays under the Cauchy-Schwarz envelope") {
  // ||t||_A <= |Gamma(N)|^{1/2} ||t||_2, so the monitored ratio
  // ||t||_A / (N^{1/2} (log N)^{1/2} ||t||_2) is bounded by sqrt(|Gamma(N)| / (N log N)).
  for (std::int64_t N : {4, 8, 16, 32, 64}) {
    auto set = IndexSet::hyperbolic_cross(2, N);
    auto t = random_on(set, static_cast<std::uint64_t>(N));
    const double ratio = a_norm(t) / (std::sqrt(double(N)) * std::sqrt(std::log(double(N))) * l2_norm(t));
    const double envelope = std::sqrt(double(set.size()) / (double(N) * std::log(double(N))));
    CHECK(ratio <= envelope);
    CHECK(envelope < 4.0);
  }
}

TEST_CASE("is_real and json round trip") {
  auto t = random_real_on(IndexSet::box({3, 2}), 4);
  CHECK(t.is_real());
  auto u = random_on(IndexSet::box({1}), 2);
  CHECK_FALSE(u.is_real(1e-12));

  auto back = trig_polynomial_from_json(to_json(t));
  CHECK(back == t);
  auto text = to_json(t).dump();
  CHECK(trig_polynomial_from_json(nlohmann::json::parse(text)) == t);

  auto ints = TrigPolynomial::from_terms(2, {{FrequencyIndex{2, -1}, Complex(3.0, -4.0)}, {FrequencyIndex{-1, 0}, 7.0}});
  auto j = to_json(ints);
  CHECK(j["entries"][0]["k"] == std::vector<int>{-1, 0});
  CHECK(trig_polynomial_from_json(j) == ints);
}
