#include "sparsetrig/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "atom_grid.hpp"
#include "fft.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/serialization.hpp"

namespace sparsetrig {

using detail::AtomOnGrid;

// ---- selection -------------------------------------------------------------

std::vector<double> score_atoms(const NormingFunctional& F, const TrigDictionary& dict) {
  const auto& atoms = dict.atoms();
  std::vector<double> out(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) out[i] = F.apply(atoms[i]);
  return out;
}

AtomChoice select_atom(const NormingFunctional& F, const TrigDictionary& dict, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("select_atom: weakness must lie in (0,1]");
  if (dict.size() == 0) throw std::invalid_argument("select_atom: empty dictionary");
  const auto scores = score_atoms(F, dict);
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::abs(scores[i]) > best) {
      best = std::abs(scores[i]);
      arg = i;
    }
  }
  if (best == 0.0) throw ResidualVanished("select_atom: every functional value is zero");
  if (t < 1.0) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (std::abs(scores[i]) >= t * best) {
        arg = i;
        break;
      }
    }
  }
  return AtomChoice{arg, dict.atom(arg), scores[arg]};
}

// ---- Chebyshev projection ----------------------------------------------------

namespace {

double mean_abs_pow(const std::vector<double>& r, double p) {
  double acc = 0.0;
  if (p == 4.0) {
    for (double v : r) {
      const double s = v * v;
      acc += s * s;
    }
  } else {
    for (double v : r) acc += std::pow(std::abs(v), p);
  }
  return acc / static_cast<double>(r.size());
}

double pnorm_of(const std::vector<double>& r, double p) {
  double peak = 0.0;
  for (double v : r) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : r) acc += std::pow(std::abs(v) / peak, p);
  return peak * std::pow(acc / static_cast<double>(r.size()), 1.0 / p);
}

ProjectionResult project_l2(const TrigPolynomial& f, std::span<const DictionaryAtom> span) {
  ProjectionResult out;
  out.coeffs.resize(span.size());
  TrigPolynomial r = f;
  for (std::size_t j = 0; j < span.size(); ++j) {
    // <f, raw> / <raw, raw> with <raw, raw> = 2^{-#active}
    const auto& key = span[j].key;
    const double ip = detail::raw_inner(f, key);
    const double rr = detail::raw_self_inner(key);
    out.coeffs[j] = ip / rr * span[j].norm_const;
    r -= span[j].polynomial() * out.coeffs[j];
  }
  out.residual_norm = l2_norm(r);
  double gap = 0.0;
  if (out.residual_norm > 0.0)
    for (const auto& a : span) gap = std::max(gap, std::abs(detail::raw_inner(r, a.key) / a.norm_const) / out.residual_norm);
  out.optimality_gap = gap;
  return out;
}

}  // namespace

ProjectionResult chebyshev_project_samples(const std::vector<double>& fs, const std::vector<int>& sizes,
                                           std::span<const DictionaryAtom> span, double p,
                                           const ProjectionOptions& opts, std::span<const double> warm,
                                           std::vector<double>* residual_out) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("chebyshev_project: need 1 < p < inf");
  const std::size_t n = span.size();
  const std::size_t G = fs.size();
  std::vector<AtomOnGrid> grid_atoms;
  grid_atoms.reserve(n);
  for (const auto& a : span) grid_atoms.emplace_back(a, sizes);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < std::min(n, warm.size()); ++j) c[static_cast<Eigen::Index>(j)] = warm[j];

  const double f_norm = pnorm_of(fs, p);
  std::vector<double> r(G);
  auto residual_at = [&](const Eigen::VectorXd& coeffs, std::vector<double>& out) {
    const auto g = detail::synthesize(grid_atoms, std::span<const double>(coeffs.data(), n), sizes);
    for (std::size_t i = 0; i < G; ++i) out[i] = fs[i] - g[i];
  };

  ProjectionResult res;
  residual_at(c, r);
  double phi = mean_abs_pow(r, p);
  std::vector<Complex> buf(G);
  std::vector<double> trial(G);
  for (int it = 0;; ++it) {
    const double rn = std::pow(phi, 1.0 / p);
    res.iterations = it;
    // u = |r|^{p-1} sign r, spectrum normalized to means
    for (std::size_t i = 0; i < G; ++i) buf[i] = std::copysign(std::pow(std::abs(r[i]), p - 1.0), r[i]);
    detail::fft_inplace(buf, sizes, -1);
    for (auto& v : buf) v /= static_cast<double>(G);
    Eigen::VectorXd corr(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) corr[static_cast<Eigen::Index>(j)] = grid_atoms[j].correlate(buf);
    const double denom = rn > 0.0 ? std::pow(rn, p - 1.0) : 1.0;
    const double gap = n == 0 || rn == 0.0 ? 0.0 : corr.cwiseAbs().maxCoeff() / denom;
    res.optimality_gap = gap;
    if (gap <= opts.tol_opt || rn <= 1e-14 * f_norm) break;
    if (it >= opts.max_iter)
      throw ConvergenceError("chebyshev_project: iteration budget exhausted", gap);

    const Eigen::VectorXd grad = -p * corr;
    // Hessian weights |r|^{p-2}, floored for p < 2
    double peak = 0.0;
    for (double v : r) peak = std::max(peak, std::abs(v));
    const double floor = 1e-8 * peak;
    for (std::size_t i = 0; i < G; ++i) buf[i] = std::pow(std::max(std::abs(r[i]), floor), p - 2.0);
    detail::fft_inplace(buf, sizes, -1);
    for (auto& v : buf) v /= static_cast<double>(G);
    Eigen::MatrixXd H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = j; l < n; ++l) {
        const double h = p * (p - 1.0) * detail::pair_correlate(grid_atoms[j], grid_atoms[l], buf, sizes);
        H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = h;
        H(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = h;
      }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || grad.dot(step) >= 0.0) {
      const double shift = 1e-10 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      H.diagonal().array() += shift;
      step = H.ldlt().solve(-grad);
      if (!step.allFinite() || grad.dot(step) >= 0.0) step = -grad;
    }
    const double slope = grad.dot(step);
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      cand = c + alpha * step;
      residual_at(cand, trial);
      const double phi_new = mean_abs_pow(trial, p);
      // slack covers roundoff once the decrease drops below machine precision
      if (phi_new <= phi + 1e-4 * alpha * slope + 8.0 * std::numeric_limits<double>::epsilon() * phi) {
        c = cand;
        r.swap(trial);
        phi = phi_new;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("chebyshev_project: line search stalled", gap);
  }
  res.coeffs.assign(c.data(), c.data() + n);
  res.residual_norm = pnorm_of(r, p);
  if (residual_out) *residual_out = std::move(r);
  return res;
}

ProjectionResult chebyshev_project(const TrigPolynomial& f, std::span<const DictionaryAtom> span, double p,
                                   std::vector<int> grid_sizes, const ProjectionOptions& opts,
                                   std::span<const double> warm_start) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("chebyshev_project: need 1 < p < inf");
  for (const auto& a : span)
    if (a.key.dim() != f.dim()) throw DimensionMismatch("chebyshev_project: atom dimension");
  if (p == 2.0) return project_l2(f, span);
  if (grid_sizes.empty()) {
    std::vector<int> mx = f.empty() ? std::vector<int>(static_cast<std::size_t>(f.dim()), 0) : f.max_abs_frequency();
    for (const auto& a : span)
      for (int j = 0; j < f.dim(); ++j) mx[static_cast<std::size_t>(j)] = std::max(mx[static_cast<std::size_t>(j)], a.key.freq[j]);
    grid_sizes = quadrature_grid(mx);
  }
  const auto g = sample(f, grid_sizes);
  std::vector<double> fs(g.total());
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] = g[i].real();
  std::vector<double> warm(warm_start.begin(), warm_start.end());
  // L_2 initial guess for coefficients not supplied
  for (std::size_t j = warm.size(); j < span.size(); ++j)
    warm.push_back(detail::raw_inner(f, span[j].key) / detail::raw_self_inner(span[j].key) * span[j].norm_const);
  return chebyshev_project_samples(fs, grid_sizes, span, p, opts, warm);
}

// ---- traces ----------------------------------------------------------------

std::vector<double> ApproximationTrace::residuals() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.residual);
  return out;
}

std::string ApproximationTrace::to_json_lines(bool full) const {
  std::ostringstream os;
  for (const auto& s : steps) {
    nlohmann::json rec;
    rec["step"] = s.step;
    rec["atom"] = {{"k", std::vector<int>(s.atom.freq.values().begin(), s.atom.freq.values().end())},
                   {"pattern", s.atom.pattern()}};
    rec["sign"] = s.sign;
    rec["score"] = s.score;
    rec["residual_p"] = s.residual;
    std::ostringstream hex;
    hex << std::hex << s.digest;
    rec["coeffs_digest"] = hex.str();
    if (full) {
      if (algorithm == Algorithm::IA) {
        rec["numerators"] = s.numerators;
        rec["denominator"] = s.step;
      } else {
        rec["coeffs"] = s.coeffs;
      }
    }
    os << rec.dump() << '\n';
  }
  return os.str();
}

namespace {

template <class T>
std::uint64_t digest_of(const std::vector<T>& v) {
  return fnv1a64(v.data(), v.size() * sizeof(T));
}

void check_real(const TrigPolynomial& f, const char* who) {
  double scale = 0.0;
  for (const auto& c : f.coeffs()) scale = std::max(scale, std::abs(c));
  if (!f.is_real(1e-12 * std::max(scale, 1.0))) throw std::invalid_argument(std::string(who) + ": target must be real-valued");
}

void check_in_box(const TrigPolynomial& f, const TrigDictionary& dict, const char* who) {
  if (f.dim() != dict.dim()) throw DimensionMismatch(std::string(who) + ": dimension mismatch");
  if (f.empty()) return;
  const auto mx = f.max_abs_frequency();
  for (int j = 0; j < f.dim(); ++j)
    if (mx[static_cast<std::size_t>(j)] > dict.box()[static_cast<std::size_t>(j)])
      throw std::invalid_argument(std::string(who) + ": target not spanned by the dictionary");
}

}  // namespace

// ---- WCGA --------------------------------------------------------------------

ApproximationTrace wcga(const TrigPolynomial& f, const TrigDictionary& dict, const WcgaOptions& opts) {
  if (!(opts.t > 0.0 && opts.t <= 1.0)) throw std::invalid_argument("wcga: weakness must lie in (0,1]");
  check_real(f, "wcga");
  check_in_box(f, dict, "wcga");
  const double p = dict.p();
  ApproximationTrace trace;
  trace.algorithm = Algorithm::WCGA;
  trace.p = p;
  trace.weakness = opts.t;
  trace.approximant = TrigPolynomial(f.dim());

  std::vector<DictionaryAtom> span;
  std::vector<double> coeffs;
  const std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.m_max, 0)), dict.size());

  if (p == 2.0) {
    TrigPolynomial r = f;
    double rn = l2_norm(f);
    trace.initial_residual = rn;
    const double f_norm = rn;
    for (std::size_t m = 1; m <= limit; ++m) {
      if (rn <= opts.stop || rn <= 1e-14 * f_norm) break;
      AtomChoice choice;
      try {
        choice = select_atom(NormingFunctional(r, 2.0, {}), dict, opts.t);
      } catch (const ResidualVanished&) {
        break;
      }
      span.push_back(choice.atom);
      // orthogonal atoms: earlier coefficients are unchanged
      const double c = detail::raw_inner(f, choice.atom.key) / detail::raw_self_inner(choice.atom.key) * choice.atom.norm_const;
      coeffs.push_back(c);
      r -= choice.atom.polynomial() * c;
      rn = l2_norm(r);
      trace.terms.push_back(TraceTerm{choice.atom.key, 1, choice.atom.norm_const});
      TraceStep st{static_cast<int>(m), choice.atom.key, 1, std::abs(choice.value), rn, digest_of(coeffs), {}, {}};
      if (opts.keep_snapshots) st.coeffs = coeffs;
      trace.steps.push_back(std::move(st));
    }
    trace.approximant = f - r;
    return trace;
  }

  const auto sizes = dict.quadrature_grid(opts.oversampling);
  const auto fg = sample(f, sizes);
  std::vector<double> fs(fg.total());
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] = fg[i].real();
  std::vector<double> r = fs;
  double rn = pnorm_of(r, p);
  trace.initial_residual = rn;
  const double f_norm = rn;
  for (std::size_t m = 1; m <= limit; ++m) {
    if (rn <= opts.stop || rn <= 1e-14 * f_norm) break;
    std::vector<Complex> rc(r.begin(), r.end());
    AtomChoice choice;
    try {
      choice = select_atom(NormingFunctional(GridFunction(sizes, std::move(rc)), p), dict, opts.t);
    } catch (const ResidualVanished&) {
      break;
    }
    if (std::find_if(span.begin(), span.end(), [&](const auto& a) { return a.key == choice.atom.key; }) != span.end())
      break;  // already optimal on the selected span
    span.push_back(choice.atom);
    // warm start: previous coefficients plus the better of 0 and the L_2 guess
    AtomOnGrid fresh(choice.atom, sizes);
    const double l2_guess =
        fresh.raw_inner_samples(r, sizes) / detail::raw_self_inner(choice.atom.key) * choice.atom.norm_const;
    std::vector<double> warm = coeffs;
    {
      std::vector<double> test = r;
      fresh.add_to(test, -l2_guess, sizes);
      warm.push_back(mean_abs_pow(test, p) < mean_abs_pow(r, p) ? l2_guess : 0.0);
    }
    std::vector<double> new_r;
    ProjectionResult pr;
    try {
      pr = chebyshev_project_samples(fs, sizes, span, p, opts.projection, warm, &new_r);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("wcga: projection failed at step " + std::to_string(m) + ": " + e.what(), e.gap());
    }
    coeffs = pr.coeffs;
    r = std::move(new_r);
    rn = pr.residual_norm;
    trace.terms.push_back(TraceTerm{choice.atom.key, 1, choice.atom.norm_const});
    TraceStep st{static_cast<int>(m), choice.atom.key, 1, std::abs(choice.value), rn, digest_of(coeffs), {}, {}};
    if (opts.keep_snapshots) st.coeffs = coeffs;
    trace.steps.push_back(std::move(st));
  }
  std::vector<RealTerm> rt;
  for (std::size_t j = 0; j < span.size(); ++j) rt.push_back(RealTerm{span[j].key, coeffs[j] / span[j].norm_const});
  trace.approximant = from_real_expansion(f.dim(), rt);
  return trace;
}

// ---- IA(eps) -----------------------------------------------------------------

Schedule Schedule::for_lp(double p, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("schedule: v must be positive");
  if (!(p > 1.0) || std::isinf(p)) throw RegimeError("schedule: need 1 < p < inf");
  if (p >= 2.0) return Schedule{v, (p - 1.0) / 2.0, 2.0};
  return Schedule{v, 1.0 / p, p};
}

double Schedule::operator()(int n) const {
  if (n < 1) throw std::invalid_argument("schedule: index starts at 1");
  const double q_dual = q / (q - 1.0);
  return v * std::pow(gamma, 1.0 / q) * std::pow(static_cast<double>(n), -1.0 / q_dual);
}

double dictionary_a_norm(const TrigPolynomial& t, const TrigDictionary& dict) {
  double s = 0.0;
  for (const auto& rt : real_expansion(t)) s += std::abs(rt.value) * dict.atom_norm_const(rt.key);
  return s;
}

namespace {

// Candidate (atom, sign) pair tracked by IA.
struct IaEntry {
  AtomKey key;
  int sign;
  double nc;
  double f_coeff;  // raw real coefficient of f on this atom
  std::int64_t count = 0;
  int term = -1;  // index into trace.terms once used
};

class IaState {
 public:
  IaState(const TrigPolynomial& f, const TrigDictionary& dict, const IaOptions& opts, ApproximationTrace& trace)
      : f_(f), dict_(dict), opts_(opts), trace_(trace), p_(dict.p()) {
    for (const auto& rt : real_expansion(f)) {
      if (!dict.contains(rt.key)) throw std::invalid_argument("ia_epsilon: target not spanned by the dictionary");
      entries_.push_back(IaEntry{rt.key, rt.value > 0 ? 1 : -1, dict.atom_norm_const(rt.key), rt.value});
    }
    support_ = entries_.size();
  }

  void run() {
    const bool coef = p_ == 2.0;
    if (!coef) {
      sizes_ = dict_.quadrature_grid(opts_.oversampling);
      const auto fg = sample(f_, sizes_);
      fs_.resize(fg.total());
      for (std::size_t i = 0; i < fs_.size(); ++i) fs_[i] = fg[i].real();
      G_.assign(fs_.size(), 0.0);
    }
    trace_.initial_residual = coef ? l2_norm(f_) : pnorm_of(fs_, p_);
    double rn = trace_.initial_residual;
    std::vector<double> r = fs_;
    for (int m = 1; m <= opts_.m_max; ++m) {
      const double eps = opts_.schedule(m);
      Pick pick = coef ? pick_coefficients(m, eps) : pick_grid(r, rn, eps);
      IaEntry& e = entries_[pick.entry];
      ++e.count;
      if (e.term < 0) {
        e.term = static_cast<int>(trace_.terms.size());
        trace_.terms.push_back(TraceTerm{e.key, e.sign, e.nc});
        order_.push_back(pick.entry);
      }
      if (coef) {
        rn = l2_residual(m);
      } else {
        const double keep = 1.0 - 1.0 / m;
        for (double& v : G_) v *= keep;
        AtomOnGrid(DictionaryAtom{e.key, e.nc}, sizes_).add_to(G_, e.sign / static_cast<double>(m), sizes_);
        if (m % opts_.resynthesis_period == 0) resynthesize(m);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = fs_[i] - G_[i];
        rn = pnorm_of(r, p_);
      }
      TraceStep st;
      st.step = m;
      st.atom = e.key;
      st.sign = e.sign;
      st.score = pick.score;
      st.residual = rn;
      std::vector<std::int64_t> nums;
      nums.reserve(order_.size());
      for (std::size_t idx : order_) nums.push_back(entries_[idx].count);
      st.digest = digest_of(nums);
      if (opts_.keep_snapshots) st.numerators = std::move(nums);
      trace_.steps.push_back(std::move(st));
    }
    const int m = opts_.m_max;
    std::vector<RealTerm> rt;
    for (const auto& e : entries_)
      if (e.count) rt.push_back(RealTerm{e.key, e.sign * static_cast<double>(e.count) / (m * e.nc)});
    trace_.approximant = m > 0 ? from_real_expansion(f_.dim(), rt) : TrigPolynomial(f_.dim());
  }

 private:
  struct Pick {
    std::size_t entry;
    double score;
  };

  static double self_inner(const AtomKey& k) { return detail::raw_self_inner(k); }

  // raw real coefficient of G_{m} on entry e (both signs folded later)
  double g_coeff(const IaEntry& e, int m) const { return e.sign * static_cast<double>(e.count) / (m * e.nc); }

  // residual raw coefficients per distinct atom at step m (m = 0: f itself)
  std::vector<double> residual_coeffs(int m) const {
    std::vector<double> rc(support_);
    for (std::size_t i = 0; i < support_; ++i) rc[i] = entries_[i].f_coeff;
    if (m > 0)
      for (std::size_t i = 0; i < entries_.size(); ++i) rc[i % support_] -= g_coeff(entries_[i], m);
    return rc;
  }

  double l2_residual(int m) const {
    const auto rc = residual_coeffs(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < support_; ++i) acc += rc[i] * rc[i] * self_inner(entries_[i].key);
    return std::sqrt(acc);
  }

  // flipped-sign copies of the support, added on the first fallback
  void add_opposites() {
    if (entries_.size() > support_) return;
    for (std::size_t i = 0; i < support_; ++i) {
      IaEntry e = entries_[i];
      e.sign = -e.sign;
      e.count = 0;
      e.term = -1;
      entries_.push_back(e);
    }
  }

  Pick pick_coefficients(int m, double eps) {
    const auto rc = residual_coeffs(m - 1);
    double rn2 = 0.0, rf = 0.0;
    for (std::size_t i = 0; i < support_; ++i) {
      const double w = self_inner(entries_[i].key);
      rn2 += rc[i] * rc[i] * w;
      rf += rc[i] * entries_[i].f_coeff * w;
    }
    const double rn = std::sqrt(rn2);
    auto score = [&](const IaEntry& e, std::size_t i) {
      if (rn == 0.0) return 0.0;
      return e.sign * rc[i % support_] * self_inner(e.key) / e.nc / rn;
    };
    const double F_f = rn == 0.0 ? 0.0 : rf / rn;
    auto best_in = [&](std::size_t lo, std::size_t hi) {
      Pick b{lo, -std::numeric_limits<double>::infinity()};
      for (std::size_t i = lo; i < hi; ++i) {
        const double s = score(entries_[i], i);
        if (s > b.score) b = Pick{i, s};
      }
      return b;
    };
    Pick b = best_in(0, support_);
    if (b.score - F_f >= -eps) return b;
    add_opposites();
    Pick alt = best_in(0, entries_.size());
    // atoms outside supp f have zero correlation with the residual
    if (alt.score - F_f >= -eps) return alt;
    if (0.0 - F_f >= -eps) throw RegimeError("ia_epsilon: only atoms outside the target support satisfy the step test");
    throw RegimeError("ia_epsilon: step test unsatisfiable at step " + std::to_string(m) + " (target outside A_1?)");
  }

  Pick pick_grid(const std::vector<double>& r, double rn, double eps) {
    std::vector<Complex> rc(r.begin(), r.end());
    const NormingFunctional F(GridFunction(sizes_, std::move(rc)), p_);
    std::vector<Complex> fc(fs_.begin(), fs_.end());
    const double F_f = F.apply(GridFunction(sizes_, std::move(fc)));
    (void)rn;
    Pick b{0, -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < support_; ++i) {
      const auto& e = entries_[i];
      const double s = e.sign * F.apply_raw(e.key) / e.nc;
      if (s > b.score) b = Pick{i, s};
    }
    if (b.score - F_f >= -eps) return b;
    // whole symmetrized dictionary
    const auto& atoms = dict_.atoms();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    int sgn = 1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double s = F.apply(atoms[i]);
      if (std::abs(s) > best) {
        best = std::abs(s);
        arg = i;
        sgn = s >= 0 ? 1 : -1;
      }
    }
    if (best - F_f < -eps)
      throw RegimeError("ia_epsilon: step test unsatisfiable (target outside A_1 or quadrature error)");
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].key == atoms[arg].key && entries_[i].sign == sgn) return Pick{i, best};
    entries_.push_back(IaEntry{atoms[arg].key, sgn, atoms[arg].norm_const, 0.0});
    return Pick{entries_.size() - 1, best};
  }

  void resynthesize(int m) {
    std::vector<AtomOnGrid> atoms;
    std::vector<double> vals;
    for (const auto& e : entries_) {
      if (!e.count) continue;
      atoms.emplace_back(DictionaryAtom{e.key, e.nc}, sizes_);
      vals.push_back(e.sign * static_cast<double>(e.count) / m);
    }
    G_ = detail::synthesize(atoms, vals, sizes_);
  }

  const TrigPolynomial& f_;
  const TrigDictionary& dict_;
  const IaOptions& opts_;
  ApproximationTrace& trace_;
  double p_;
  std::vector<IaEntry> entries_;
  std::size_t support_ = 0;
  std::vector<std::size_t> order_;
  std::vector<int> sizes_;
  std::vector<double> fs_, G_;
};

}  // namespace

ApproximationTrace ia_epsilon(const TrigPolynomial& f, const TrigDictionary& dict, const IaOptions& opts) {
  check_real(f, "ia_epsilon");
  if (f.dim() != dict.dim()) throw DimensionMismatch("ia_epsilon: dimension mismatch");
  if (opts.m_max < 0) throw std::invalid_argument("ia_epsilon: negative step count");
  if (opts.resynthesis_period < 1) throw std::invalid_argument("ia_epsilon: resynthesis period must be positive");
  const double a = dictionary_a_norm(f, dict);
  if (a > 1.0 + 1e-9) throw RegimeError("ia_epsilon: target A-norm exceeds 1");
  ApproximationTrace trace;
  trace.algorithm = Algorithm::IA;
  trace.p = dict.p();
  trace.schedule_v = opts.schedule.v;
  trace.approximant = TrigPolynomial(f.dim());
  if (f.empty()) throw std::invalid_argument("ia_epsilon: zero target");
  IaState(f, dict, opts, trace).run();
  return trace;
}

}  // namespace sparsetrig
