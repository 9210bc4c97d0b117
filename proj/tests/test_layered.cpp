#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/layered.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/rate_fit.hpp"
#include "test_helpers.hpp"

using namespace sparsetrig;
using sparsetrig::testing::random_real_on;

namespace {

TrigPolynomial atom_poly(FrequencyIndex k, std::uint32_t mask) {
  return DictionaryAtom{make_atom_key(std::move(k), mask), 1.0}.polynomial();
}

}  // namespace

TEST_CASE("fit_rate") {
  std::vector<std::pair<double, double>> pure, logged;
  for (double m : {4.0, 8.0, 16.0, 64.0, 256.0}) {
    pure.emplace_back(m, 3.0 / m);
    logged.emplace_back(m, std::pow(std::log(m), 2.0) / m);
  }
  const auto a = fit_rate(pure, 0.0);
  CHECK(std::abs(a.slope + 1.0) < 1e-12);
  CHECK(std::abs(a.intercept - std::log(3.0)) < 1e-12);
  CHECK(a.residual < 1e-12);
  const auto b = fit_rate(logged, 2.0);
  CHECK(std::abs(b.slope + 1.0) < 1e-12);
  CHECK(std::abs(b.band_lo + 1.0) < 1e-12);
  CHECK(std::abs(b.band_hi + 1.0) < 1e-12);
  // a kink widens the leave-one-out band around the full fit
  auto noisy = pure;
  noisy[2].second *= 2.0;
  const auto c = fit_rate(noisy, 0.0);
  CHECK(c.band_lo <= c.slope);
  CHECK(c.band_hi >= c.slope);
  CHECK(c.band_hi - c.band_lo > 0.01);
  CHECK_THROWS(fit_rate({{2, 1}, {3, 1}, {4, 1}}, 0.0));
  CHECK_THROWS(fit_rate({{2, 1}, {3, 0}, {4, 1}, {5, 1}}, 0.0));
  CHECK_THROWS(fit_rate({{4, 1}, {4, 2}, {4, 1}, {4, 3}}, 0.0));
  CHECK(to_json(a)["rows"].size() == 5);
}

TEST_CASE("g_p_m basics") {
  const auto atom = atom_poly(FrequencyIndex{3, 2}, 0b01) * Complex(2.5, 0.0);
  for (double p : {2.0, 4.0}) {
    const auto g = g_p_m(atom, 5, p);
    CHECK(g.error < 1e-12);
    CHECK(max_coeff_diff(g.approximant, atom) < 1e-12);
    CHECK(g.atoms == 1);
  }
  const auto t = random_real_on(IndexSet::box({4, 3}), 4);
  const auto z = g_p_m(t, 0, 4.0);
  CHECK(z.approximant.empty());
  CHECK(z.error == doctest::Approx(norm_value(t, Exponent::lp(4.0))));
  CHECK(z.error <= real_a_norm(t));
  CHECK(z.error <= a_norm(t));

  for (double p : {2.0, 4.0, 6.0}) {
    for (int m : {1, 7, 40}) {
      const auto g = g_p_m(t, m, p);
      CHECK(g.atoms <= m);
      CHECK(real_a_norm(g.approximant) == doctest::Approx(real_a_norm(t)).epsilon(1e-12));
      CHECK(g.error == doctest::Approx(p == 2.0 ? l2_norm(t - g.approximant)
                                                : norm_value(t - g.approximant, Exponent::lp(p)))
                           .epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(g_p_m(t, 3, 1.5), RegimeError);
  CHECK_THROWS_AS(g_p_m(t, 3, INFINITY), RegimeError);
  CHECK_THROWS(g_p_m(TrigPolynomial(2), 3, 4.0));
}

TEST_CASE("g_p_m: m^{-1/2} constant on Box(16,16), p = 4") {
  const auto t = random_real_on(IndexSet::box({16, 16}), 21);
  std::vector<double> c;
  for (int m : {4, 16, 64, 256}) {
    const auto g = g_p_m(t, m, 4.0);
    c.push_back(g.error * std::sqrt(m) / g.a_norm);
  }
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  MESSAGE("error m^{1/2} / ||t||_A in [" << *lo << ", " << *hi << "]");
  CHECK(*hi <= 4.0 * std::sqrt(2.0));  // C(v) gamma^{1/2} with gamma = 3/2, v = 1, C <= 4
  CHECK(*hi / *lo <= 4.0);
}

TEST_CASE("g_inf_m") {
  CHECK(g_inf_exponent(std::exp(2.0)) == 2);
  CHECK(g_inf_exponent(1.0) == 2);
  CHECK(g_inf_exponent(1089.0) == 7);
  CHECK(g_inf_exponent(std::exp(5.0) + 1.0) == 6);
  CHECK(box_theta({16, 16}) == 1089.0);

  const auto atom = atom_poly(FrequencyIndex{5, 0}, 0b11);
  const auto ga = g_inf_m(atom, 3);
  CHECK(ga.error < 1e-12);

  const auto t = random_real_on(IndexSet::box({16, 16}), 8);
  const double lnt = std::log(box_theta({16, 16}));
  std::vector<double> c;
  for (int m : {4, 16, 64, 256}) {
    const auto g = g_inf_m(t, m);
    CHECK(g.p == 7.0);
    CHECK(g.error >= norm_value(t - g.approximant, Exponent::lp(7.0)) * (1 - 1e-9));
    c.push_back(g.error * std::sqrt(m) / (g.a_norm * std::sqrt(lnt)));
  }
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  MESSAGE("sup error m^{1/2} / (||t||_A (ln theta)^{1/2}) in [" << *lo << ", " << *hi << "]");
  CHECK(*hi <= 4.0);
  CHECK(*hi / *lo <= 4.0);
}

TEST_CASE("layer schedule") {
  const auto s = LayerSchedule::make(3, 0.5, 2, 8);
  CHECK(s.m_l.size() == 5);
  // floor(2^{3 - (l-3)/2} l) by hand: 22.6, 20, 16.97, 14, 11.3
  const std::map<int, std::int64_t> expected{{4, 22}, {5, 20}, {6, 16}, {7, 14}, {8, 11}};
  CHECK(s.m_l == expected);
  // beyond the polynomial factor's range the budgets decrease
  const auto t = LayerSchedule::make(6, 0.5, 2, 40);
  for (int l = 20; l < 40; ++l) CHECK(t.m_l.at(l + 1) <= t.m_l.at(l));
  // total budget ~ 2^n n^{d-1}
  for (int n = 3; n <= 12; ++n) {
    const double ratio = LayerSchedule::make(n, 0.5, 2, n + 30).total_budget() / (std::exp2(n) * n);
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 6.0);
  }
  CHECK_THROWS(LayerSchedule::make(3, 0.0, 2, 6));
}

TEST_CASE("a_m invariants") {
  const auto target = RateTarget::of(ClassSpec::W(1.5, 2.0, 2));
  SUBCASE("f in T(Q_n) is reproduced") {
    const auto s = target.sample(4, 3);
    const auto res = a_m(s, 2.0, 0.5, 4);
    CHECK(res.layers.empty());
    CHECK(res.error == 0.0);
    CHECK(res.total_terms == static_cast<std::int64_t>(s.f.size()));
  }
  for (double p : {2.0, 4.0, std::numeric_limits<double>::infinity()}) {
    const auto s = target.sample(6, 5);
    const auto res = a_m(s, p, 0.5, 3);
    CAPTURE(p);
    std::int64_t terms = res.base.size();
    double err_sum = 0.0;
    for (const auto& part : res.layers) {
      terms += static_cast<std::int64_t>(part.part.size());
      err_sum += part.error;
      if (part.budget > 0)
        CHECK(part.part_a_norm == doctest::Approx(part.layer_a_norm).epsilon(1e-12));
      else
        CHECK(part.error == doctest::Approx(part.layer_norm));
      CHECK(part.layer_a_norm == doctest::Approx(real_a_norm(layer(s.f, part.l))).epsilon(1e-12));
    }
    CHECK(terms == res.total_terms);
    CHECK(res.error <= err_sum * (1 + 1e-9) + 1e-14);
    CHECK(res.error > 0.0);
    CHECK(res.tail > 0.0);
    CHECK(res.error_lower_bound == std::isinf(p));
    // threads do not change the result
    AmOptions par;
    par.threads = 4;
    const auto res4 = a_m(s, p, 0.5, 3, par);
    CHECK(res4.approximant() == res.approximant());
  }
  const auto s = target.sample(5, 1);
  CHECK_THROWS_AS(a_m(s, 2.0, 1.0, 3), RegimeError);  // a = 1
  CHECK_THROWS_AS(a_m(s, 1.5, 0.5, 3), RegimeError);
}

TEST_CASE("rate lines") {
  const auto l1 = rate_line(RateTarget::of(ClassSpec::W(1.5, 2.0, 2)), 2.0);
  CHECK(l1.rho == doctest::Approx(1.5));
  CHECK(l1.kappa == doctest::Approx(1.5));
  const auto l2 = rate_line(RateTarget::of(ClassSpec::W(1.5, 2.0, 2)), 4.0);
  CHECK(l2.rho == doctest::Approx(1.5));
  CHECK(l2.kappa == doctest::Approx(1.5));
  CHECK(l2.id == "W:2<=q<=p");
  {
    const double r = 1.4, q = 1.5, d = 2;
    const double eta = 1.0 / q - 0.5;
    const auto l = rate_line(RateTarget::of(ClassSpec::W(r, q, 2)), 2.0);
    CHECK(l.rho == doctest::Approx(r - eta).epsilon(1e-14));
    CHECK(l.kappa == doctest::Approx((d - 1) * (r - 2 * eta)).epsilon(1e-14));
    CHECK(l.id == "W:q<=2<=p");
  }
  // q >= 2 uses the q = 2 line
  const auto l3 = rate_line(RateTarget::of(ClassSpec::W(1.2, 4.0, 3)), 6.0);
  CHECK(l3.rho == doctest::Approx(1.2));
  CHECK(l3.kappa == doctest::Approx(2 * 1.2));
  // p = inf adds 1/2 to the log power
  const auto linf = rate_line(RateTarget::of(ClassSpec::W(1.2, 4.0, 3)), INFINITY);
  CHECK(linf.kappa == doctest::Approx(2 * 1.2 + 0.5));
  // H: (r - eta, (d-1)(r - 1/q + 1)); q >= 2: (r, (d-1)(r + 1/2))
  const auto h = rate_line(RateTarget::of(ClassSpec::H(1.0, 1.5, 2)), 3.0);
  CHECK(h.rho == doctest::Approx(1.0 - (1 / 1.5 - 0.5)));
  CHECK(h.kappa == doctest::Approx(1.0 - 1 / 1.5 + 1));
  const auto h2 = rate_line(RateTarget::of(ClassSpec::H(1.0, 3.0, 2)), INFINITY);
  CHECK(h2.rho == doctest::Approx(1.0));
  CHECK(h2.kappa == doctest::Approx(1.5 + 0.5));
  // B and Htheta subtract 1/theta from the log power
  const auto bq = rate_line(RateTarget::of(ClassSpec::B(1.0, 2.0, 4.0, 2)), 4.0);
  CHECK(bq.kappa == doctest::Approx(1.0 + 0.5 - 0.25));
  const auto ht = rate_line(RateTarget::of(ClassSpec::Htheta(1.0, 2.0, 4.0, 3)), 4.0);
  CHECK(ht.kappa == doctest::Approx(2 * (1.0 + 0.5 - 0.25)));
  // kernel target: (r - 1/2, r(d-1)), plus 1/2 at p = inf
  const auto f = rate_line(RateTarget::kernel(1.5, 2), 2.0);
  CHECK(f.rho == doctest::Approx(1.0));
  CHECK(f.kappa == doctest::Approx(1.5));
  CHECK(rate_line(RateTarget::kernel(1.5, 2), INFINITY).kappa == doctest::Approx(2.0));

  CHECK_THROWS_AS(rate_line(RateTarget::kernel(0.9, 2), 2.0), RegimeError);
  CHECK_THROWS_AS(rate_line(RateTarget::of(ClassSpec::H(0.6, 1.5, 2)), 2.0), RegimeError);
  CHECK_THROWS_AS(rate_line(RateTarget::of(ClassSpec::H(0.4, 3.0, 2)), 4.0), RegimeError);
  CHECK_THROWS_AS(rate_line(RateTarget::of(ClassSpec::W(1.5, 2.0, 2)), 1.5), RegimeError);
  CHECK_THROWS_AS(rate_line(RateTarget::kernel(1.5, 2), 2.0, 0.5), RegimeError);
  try {
    rate_line(RateTarget::of(ClassSpec::W(1.5, 2.0, 2)), 2.0, 1.2);
  } catch (const RegimeError& e) {
    CHECK(std::string(e.what()).find("mu < a") != std::string::npos);
  }
}

TEST_CASE("sigma_upper_curve") {
  const auto target = RateTarget::of(ClassSpec::W(1.5, 2.0, 2));
  CurveOptions opts;
  opts.extra_layers = 4;
  const auto rows = sigma_upper_curve(target, 2.0, 0.5, {3, 4, 5}, {1, 2}, opts);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    CHECK(std::tie(rows[i].n, rows[i].seed) < std::tie(rows[i + 1].n, rows[i + 1].seed));
  for (const auto& row : rows) {
    CHECK(row.regime == "W:2<=q<=p");
    CHECK(row.predicted == doctest::Approx(std::pow(row.m, -1.5) * std::pow(std::log(row.m), 1.5)));
    CHECK(row.ratio == doctest::Approx(row.error / row.predicted));
    const double band = row.m / (std::exp2(row.n) * row.n);
    CHECK(band >= 1.0);
    CHECK(band <= 40.0);
  }
  // more terms, smaller error, per seed
  for (std::uint64_t seed : {1u, 2u}) {
    double prev = INFINITY;
    for (const auto& row : rows)
      if (row.seed == seed) {
        CHECK(row.error < prev);
        prev = row.error;
      }
  }
  CurveOptions par = opts;
  par.threads = 4;
  const auto again = sigma_upper_curve(target, 2.0, 0.5, {3, 4, 5}, {1, 2}, par);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(curve_csv_row(rows[i]) == curve_csv_row(again[i]));
  CHECK(curve_csv_header() == "regime,d,r,q,p,theta,mu,n,seed,m,error_p,predicted,ratio,tail");
  std::istringstream line(curve_csv_row(rows[0]));
  int fields = 0;
  for (std::string cell; std::getline(line, cell, ',');) ++fields;
  CHECK(fields == 14);
  CHECK(sigma_upper_curve(target, 2.0, 0.5, {3}, {}, opts).empty());
  CHECK_THROWS_AS(sigma_upper_curve(target, 2.0, 1.5, {3}, {1}, opts), RegimeError);
}
