#include "sparsetrig/layered.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/greedy.hpp"
#include "sparsetrig/index_set.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/parallel.hpp"
#include "sparsetrig/serialization.hpp"

namespace sparsetrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lp_error(const TrigPolynomial& t, double p, int oversampling) {
  if (t.empty()) return 0.0;
  if (p == 2.0) return l2_norm(t);
  return norm_value(t, std::isinf(p) ? Exponent::sup() : Exponent::lp(p), oversampling);
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

// ---- G^p_m / G^inf_m ----------------------------------------------------------

GreedyApproximation g_p_m(const TrigPolynomial& t, int m, double p, const GreedyOptions& opts) {
  if (!(p >= 2.0) || std::isinf(p)) throw RegimeError("g_p_m: need 2 <= p < inf");
  if (m < 0) throw std::invalid_argument("g_p_m: negative term count");
  if (t.empty()) throw std::invalid_argument("g_p_m: zero polynomial");
  GreedyApproximation out;
  out.p = p;
  out.approximant = TrigPolynomial(t.dim());
  out.a_norm = real_a_norm(t);
  if (m == 0) {
    out.error = lp_error(t, p, opts.oversampling);
    return out;
  }
  const TrigDictionary dict(t.max_abs_frequency(), p, AtomScaling::Unit);
  const TrigPolynomial f = t * Complex(1.0 / out.a_norm, 0.0);
  IaOptions io;
  io.schedule = Schedule::for_lp(p, opts.v);
  io.m_max = m;
  io.oversampling = opts.oversampling;
  io.keep_snapshots = false;
  const auto trace = ia_epsilon(f, dict, io);
  out.approximant = trace.approximant * Complex(out.a_norm, 0.0);
  out.error = trace.steps.back().residual * out.a_norm;
  out.atoms = static_cast<int>(trace.terms.size());
  return out;
}

int g_inf_exponent(double theta) {
  if (!(theta >= 1.0)) throw std::invalid_argument("g_inf_exponent: need theta >= 1");
  // the slack keeps ln(e^k) from rounding up past k
  return std::max(2, static_cast<int>(std::ceil(std::log(theta) - 1e-12)));
}

double box_theta(const std::vector<int>& N) {
  double theta = 1.0;
  for (int n : N) theta *= 2.0 * n + 1.0;
  return theta;
}

GreedyApproximation g_inf_m(const TrigPolynomial& t, int m, const GreedyOptions& opts) {
  if (t.empty()) throw std::invalid_argument("g_inf_m: zero polynomial");
  const int p = g_inf_exponent(box_theta(t.max_abs_frequency()));
  auto out = g_p_m(t, m, p, opts);
  out.error = lp_error(t - out.approximant, kInf, opts.oversampling);
  return out;
}

// ---- layered scheme -------------------------------------------------------------

LayerSchedule LayerSchedule::make(int n, double mu, int d, int l_max) {
  if (n < 0) throw std::invalid_argument("LayerSchedule: need n >= 0");
  if (!(mu > 0.0)) throw std::invalid_argument("LayerSchedule: need mu > 0");
  if (d < 1) throw std::invalid_argument("LayerSchedule: need d >= 1");
  LayerSchedule s;
  s.n = n;
  s.mu = mu;
  s.d = d;
  s.l_max = l_max;
  for (int l = n + 1; l <= l_max; ++l) {
    const double v = std::exp2(n - mu * (l - n)) * std::pow(static_cast<double>(l), d - 1);
    s.m_l[l] = static_cast<std::int64_t>(std::floor(v));
  }
  return s;
}

std::int64_t LayerSchedule::total_budget() const {
  std::int64_t total = 0;
  for (const auto& [l, m] : m_l) total += m;
  return total;
}

TrigPolynomial ConstructiveApproximant::approximant() const {
  TrigPolynomial a = base;
  for (const auto& part : layers) a += part.part;
  return a;
}

ConstructiveApproximant a_m(const ClassSample& f, double p, double mu, int n, const AmOptions& opts) {
  if (!(p >= 2.0)) throw RegimeError("a_m: need p >= 2");
  const double a = f.spec.layer_a();
  if (!(mu > 0.0 && mu < a)) throw RegimeError("a_m: need 0 < mu < a = " + fmt(a));
  if (n < 1) throw std::invalid_argument("a_m: need n >= 1");
  const int d = f.f.dim();
  const int top = top_layer(f.f);

  ConstructiveApproximant out;
  out.p = p;
  out.mu = mu;
  out.n = n;
  out.schedule = LayerSchedule::make(n, mu, d, top);
  out.base = hyperbolic_partial_sum(f.f, n);
  out.error_lower_bound = std::isinf(p);

  std::vector<LayerPart> parts;
  for (const auto& [l, budget] : out.schedule.m_l) {
    LayerPart part;
    part.l = l;
    part.budget = budget;
    part.part = layer(f.f, l);  // holds f_l until the greedy run replaces it
    if (!part.part.empty()) parts.push_back(std::move(part));
  }
  const int os = opts.greedy.oversampling;
  parallel_for(parts.size(), opts.threads, [&](std::size_t i) {
    LayerPart& part = parts[i];
    const TrigPolynomial fl = std::move(part.part);
    const int m = static_cast<int>(std::min<std::int64_t>(part.budget, std::numeric_limits<int>::max()));
    const auto g = std::isinf(p) ? g_inf_m(fl, m, opts.greedy) : g_p_m(fl, m, p, opts.greedy);
    part.part = g.approximant;
    part.layer_a_norm = g.a_norm;
    part.part_a_norm = part.part.empty() ? 0.0 : real_a_norm(part.part);
    part.layer_norm = lp_error(fl, p, os);
    part.error = g.error;
    part.terms = static_cast<int>(part.part.size());
  });
  out.layers = std::move(parts);

  out.total_terms = static_cast<std::int64_t>(out.base.size());
  for (const auto& part : out.layers) out.total_terms += part.terms;
  out.error = lp_error(f.f - out.approximant(), p, os);
  out.tail = tail_estimate(f, p);
  return out;
}

// ---- rate table -----------------------------------------------------------------

RateTarget RateTarget::of(const ClassSpec& spec) {
  spec.validate();
  RateTarget t;
  t.spec = spec;
  t.d = spec.d;
  t.r = spec.r;
  return t;
}

RateTarget RateTarget::kernel(double r, int d) {
  if (!(r > 0.0)) throw RegimeError("kernel target: need r > 0");
  if (d < 1) throw RegimeError("kernel target: need d >= 1");
  RateTarget t;
  t.bernoulli = true;
  t.r = r;
  t.d = d;
  return t;
}

double RateTarget::layer_a() const { return bernoulli ? r - 1.0 : spec.layer_a(); }
double RateTarget::layer_b() const { return bernoulli ? 1.0 : spec.layer_b(); }

std::string RateTarget::describe() const {
  if (!bernoulli) return spec.describe();
  return "F(d=" + std::to_string(d) + ",r=" + fmt(r) + ")";
}

nlohmann::json RateTarget::to_json() const {
  if (!bernoulli) return sparsetrig::to_json(spec);
  return nlohmann::json{{"kind", "F"}, {"d", d}, {"r", r}};
}

RateTarget RateTarget::from_json(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() == "F") return kernel(j.at("r").get<double>(), j.at("d").get<int>());
  return of(class_spec_from_json(j));
}

ClassSample RateTarget::sample(int level, std::uint64_t seed) const {
  const auto Q = IndexSet::step_hyperbolic_cross(d, level);
  if (!bernoulli) return sample_class(spec, Q, seed);
  if (!(r > 1.0)) throw RegimeError("kernel target: layered sampling needs r > 1");
  ClassSample s;
  s.f = bernoulli_coeffs(r, Q);
  // the kernel's layers obey the A-norm decay with a = r - 1, b = 1
  s.spec = ClassSpec::WAb(r - 1.0, 1.0, d);
  s.truncation = Q.describe();
  s.truncation_level = level;
  s.seed = seed;
  s.certificate = class_norm(s.f, s.spec);
  return s;
}

RateLine rate_line(const RateTarget& target, double p, double mu) {
  if (!(p >= 2.0)) throw RegimeError("rate_line: the layered lines need p >= 2");
  const bool inf = std::isinf(p);
  const int d = target.d;
  RateLine line;
  std::string suffix = inf ? ":p=inf" : "";
  if (target.bernoulli) {
    if (!(target.r > 1.0)) throw RegimeError("rate_line: kernel target needs r > 1");
    line.id = "F:2<=p" + suffix;
    line.guard = "r > 1";
  } else {
    const ClassSpec& s = target.spec;
    const double q = s.q;
    if (s.kind == ClassKind::WAb) {
      line.id = "WAb" + suffix;
      line.guard = "a > 0";
    } else {
      // q = 2 sits on both lines, which agree there; it is labeled 2 <= q
      if (q < 2.0) {
        if (!(s.r > 1.0 / q)) throw RegimeError("rate_line: need r > 1/q for 1 < q <= 2");
        line.guard = "r > 1/q";
      } else {
        if (!(s.r > 0.5)) throw RegimeError("rate_line: need r > 1/2 for q >= 2");
        line.guard = "r > 1/2";
      }
      std::string regime;
      if (inf)
        regime = q < 2.0 ? "q<=2" : "2<=q";
      else if (q < 2.0)
        regime = "q<=2<=p";
      else
        regime = q <= p ? "2<=q<=p" : "2<=p<q";
      line.id = to_string(s.kind) + ":" + regime + suffix;
    }
  }
  const double a = target.layer_a();
  const double b = target.layer_b();
  if (mu > 0.0 && !(mu < a)) throw RegimeError("rate_line: need mu < a = " + fmt(a));
  line.rho = a + 0.5;
  line.kappa = (d - 1) * (a + b) + (inf ? 0.5 : 0.0);
  return line;
}

std::vector<CurveRow> sigma_upper_curve(const RateTarget& target, double p, double mu, const std::vector<int>& n_values,
                                        const std::vector<std::uint64_t>& seeds, const CurveOptions& opts) {
  const RateLine line = rate_line(target, p, mu);
  if (n_values.empty() || seeds.empty()) return {};
  if (*std::min_element(n_values.begin(), n_values.end()) < 1)
    throw std::invalid_argument("sigma_upper_curve: need n >= 1");
  const int level = *std::max_element(n_values.begin(), n_values.end()) + opts.extra_layers;

  std::vector<ClassSample> samples(seeds.size());
  parallel_for(seeds.size(), opts.threads, [&](std::size_t i) { samples[i] = target.sample(level, seeds[i]); });

  struct Task {
    std::size_t seed_index;
    int n;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (int n : n_values) tasks.push_back(Task{i, n});
  std::vector<CurveRow> rows(tasks.size());
  parallel_for(tasks.size(), opts.threads, [&](std::size_t i) {
    const auto& task = tasks[i];
    const auto res = a_m(samples[task.seed_index], p, mu, task.n, opts.am);
    CurveRow& row = rows[i];
    row.regime = line.id;
    row.d = target.d;
    row.r = target.r;
    row.q = target.bernoulli ? 1.0 : target.spec.q;
    row.theta = target.bernoulli ? kInf : target.spec.theta;
    row.p = p;
    row.mu = mu;
    row.n = task.n;
    row.seed = seeds[task.seed_index];
    row.m = res.total_terms;
    row.error = res.error;
    const double m = static_cast<double>(std::max<std::int64_t>(res.total_terms, 2));
    row.predicted = std::pow(m, -line.rho) * std::pow(std::log(m), line.kappa);
    row.ratio = row.error / row.predicted;
    row.tail = res.tail;
  });
  std::sort(rows.begin(), rows.end(),
            [](const CurveRow& x, const CurveRow& y) { return std::tie(x.n, x.seed) < std::tie(y.n, y.seed); });
  return rows;
}

std::string curve_csv_header() { return "regime,d,r,q,p,theta,mu,n,seed,m,error_p,predicted,ratio,tail"; }

std::string curve_csv_row(const CurveRow& row) {
  std::ostringstream os;
  os << row.regime << ',' << row.d << ',' << fmt(row.r) << ',' << fmt(row.q) << ',' << fmt(row.p) << ','
     << fmt(row.theta) << ',' << fmt(row.mu) << ',' << row.n << ',' << row.seed << ',' << row.m << ','
     << fmt(row.error) << ',' << fmt(row.predicted) << ',' << fmt(row.ratio) << ',' << fmt(row.tail);
  return os.str();
}

}  // namespace sparsetrig
