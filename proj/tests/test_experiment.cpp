#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/experiment.hpp"
#include "sparsetrig/serialization.hpp"

using namespace sparsetrig;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_rates() {
  auto c = preset("w-2-le-q-le-p");
  c.n_values = {2, 3, 4, 5};
  c.seeds = {1};
  c.extra_layers = 2;
  c.threads = 1;
  return c;
}

ExperimentConfig small_approx() {
  auto c = preset("ia-lp");
  c.box = {4, 4};
  c.m_min = 4;
  c.m_max = 32;
  c.seeds = {1, 2, 3};
  c.threads = 1;
  return c;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sparsetrig_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config serialization") {
  for (const auto& [name, cfg] : presets()) {
    CAPTURE(name);
    const auto j = cfg.to_json();
    const auto back = ExperimentConfig::from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.to_json() == j);
    CHECK(back.id == name);
  }
  auto j = preset("ia-linf").to_json();
  CHECK(j["p"] == "inf");
  CHECK(j["tolerances"]["slope_lo"].is_null());
  CHECK(std::isinf(ExperimentConfig::from_json(j).p));
  j["bogus"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), std::invalid_argument);
  auto k = preset("ia-lp").to_json();
  k["kind"] = "plot";
  CHECK_THROWS_AS(ExperimentConfig::from_json(k), std::invalid_argument);
  k = preset("ia-lp").to_json();
  k["p"] = "huge";
  CHECK_THROWS_AS(ExperimentConfig::from_json(k), std::invalid_argument);
}

TEST_CASE("presets name their claim and guard and match the shipped files") {
  CHECK(presets().size() >= 17);
  for (const auto& [name, cfg] : presets()) {
    CAPTURE(name);
    CHECK_FALSE(cfg.claim.empty());
    CHECK_FALSE(cfg.guard.empty());
    CHECK_NOTHROW(cfg.validate());
    const fs::path file = fs::path(SPARSETRIG_PRESET_DIR) / (name + ".json");
    REQUIRE(fs::exists(file));
    CHECK(nlohmann::json::parse(slurp(file)) == cfg.to_json());
  }
  for (const char* kind : {"approx", "rates", "cubature", "oracle"}) {
    bool found = false;
    for (const auto& [name, cfg] : presets()) found = found || to_string(cfg.kind) == kind;
    CHECK(found);
  }
  CHECK_THROWS_AS(preset("no-such-preset"), std::invalid_argument);
}

TEST_CASE("guards are enforced before a run") {
  auto c = preset("w-2-le-q-le-p");
  c.r = 0.4;  // r > 1/2 fails
  CHECK_THROWS_AS(c.validate(), RegimeError);
  CHECK_THROWS_AS(run(c), RegimeError);

  c = preset("w-2-le-q-le-p");
  c.mu = 1.0;  // a = r - 1/2 = 1
  try {
    c.validate();
    FAIL("expected a guard violation");
  } catch (const RegimeError& e) {
    CHECK(std::string(e.what()).find("mu < a") != std::string::npos);
  }
  c = preset("w-2-le-q-le-p");
  c.p = 1.5;
  CHECK_THROWS_AS(c.validate(), RegimeError);

  c = preset("kernel-p-ge-2");
  c.r = 0.9;
  CHECK_THROWS_AS(c.validate(), RegimeError);

  c = preset("cubature-h");
  c.r = 0.4;
  CHECK_THROWS_AS(c.validate(), RegimeError);
  c = preset("cubature-h");
  c.family = ClassKind::W;
  CHECK_THROWS_AS(c.validate(), RegimeError);

  c = preset("oracle-l2");
  c.p = 4.0;
  CHECK_THROWS_AS(c.validate(), RegimeError);
  c = preset("ia-lp");
  c.p = 1.0;
  CHECK_THROWS_AS(c.validate(), RegimeError);

  c = preset("ia-lp");
  c.box = {16};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = preset("ia-lp");
  c.m_max = 9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = preset("w-2-le-q-le-p");
  c.n_values = {3, 4, 4};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = preset("w-2-le-q-le-p");
  c.method = "magic";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("random box polynomials") {
  const auto t = random_box_polynomial({3, 2}, 7);
  CHECK(t.is_real(1e-15));
  CHECK(real_a_norm(t) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(max_coeff_diff(t, random_box_polynomial({3, 2}, 7)) == 0.0);
  CHECK(max_coeff_diff(t, random_box_polynomial({3, 2}, 8)) > 1e-3);
  CHECK(real_expansion(t).size() == 35);  // theta(3, 2) = 7 * 5
}

TEST_CASE("empty seed list") {
  for (const char* name : {"ia-lp", "w-2-le-q-le-p", "cubature-h", "oracle-l2"}) {
    auto c = preset(name);
    c.seeds.clear();
    const auto res = run(c);
    CHECK(res.rows == 0);
    CHECK(res.csv.find('\n') == res.csv.size() - 1);  // header only
    CHECK(res.exit_code() == 0);
    REQUIRE(res.warnings.size() == 1);
  }
}

TEST_CASE("rates run, determinism and replay") {
  const auto c = small_rates();
  const auto res = run(c);
  CHECK(res.rows == 4);
  CHECK(res.csv.rfind("regime,d,r,q,p,theta,mu,n,seed,m,error_p,predicted,ratio,tail\n", 0) == 0);
  REQUIRE(res.results.contains("fit"));
  CHECK(res.results["fit"]["slope"].is_number());
  CHECK(res.results["fit"]["slope"].get<double>() < 0.0);
  CHECK(res.results["line"]["id"] == "W:2<=q<=p");
  CHECK(res.results["line"]["kappa"].get<double>() == doctest::Approx(1.5));
  REQUIRE(res.checks.size() == 1);
  CHECK(res.checks[0].name == "rate_band");

  auto c3 = c;
  c3.threads = 3;
  CHECK(run(c3).csv == res.csv);
  CHECK(run(c).csv == res.csv);

  const auto dir = temp_dir("bundle");
  write_bundle(res, dir, "rates");
  CHECK(slurp(dir / "results.csv") == res.csv);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["id"] == c.id);
  CHECK(summary["rows"] == 4);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["outputs"]["results.csv"]["fnv1a64"] == hex64(fnv1a64(res.csv)));

  const auto again = replay(manifest);
  CHECK(again.csv == res.csv);
  CHECK(again.checks.back().name == "replay_identical");
  CHECK(again.checks.back().passed);

  auto tampered = manifest;
  tampered["outputs"]["results.csv"]["fnv1a64"] = "0000000000000000";
  const auto bad = replay(tampered);
  CHECK(bad.status() == RunStatus::Fail);
  CHECK(bad.exit_code() == 1);
  CHECK_THROWS(replay(nlohmann::json{{"format", "other"}}));

  // a regular file where the directory should go
  const auto blocker = temp_dir("blocker");
  std::ofstream(blocker.string()) << "x";
  CHECK_THROWS_AS(write_bundle(res, blocker / "sub", "rates"), std::runtime_error);
  fs::remove_all(dir);
  fs::remove(blocker);
}

TEST_CASE("status from checks") {
  RunResult r;
  CHECK(r.status() == RunStatus::Pass);
  r.checks.push_back({"a", true, Severity::Assert, ""});
  r.checks.push_back({"b", false, Severity::Monitor, ""});
  CHECK(r.status() == RunStatus::Warn);
  CHECK(r.exit_code() == 2);
  r.checks.push_back({"c", false, Severity::Assert, ""});
  CHECK(r.status() == RunStatus::Fail);
  CHECK(r.exit_code() == 1);

  // a monitored rate preset turns a band miss into a warning
  auto c = small_rates();
  c.tol.slope_lo = -0.2;
  c.tol.slope_hi = -0.1;
  c.monitored = false;
  CHECK(run(c).exit_code() == 1);
  c.monitored = true;
  CHECK(run(c).exit_code() == 2);
}

TEST_CASE("approx run") {
  const auto res = run(small_approx());
  CHECK(res.rows == 3 * 29);
  REQUIRE(res.checks.size() == 2);
  CHECK(res.checks[0].name == "a_norm_conserved");
  CHECK(res.checks[0].passed);
  CHECK(res.results["p_used"] == 4.0);
  CHECK(res.results["seeds"].size() == 3);

  auto c = small_approx();
  c.p = std::numeric_limits<double>::infinity();
  const auto sup = run(c);
  CHECK(sup.results["p_used"] == 5.0);  // ceil(ln 81)
  CHECK(sup.checks[0].passed);
}

TEST_CASE("cubature and oracle runs") {
  auto c = preset("cubature-h");
  c.n_values = {2, 3, 4, 5};
  c.exact_check_max = 4;
  const auto cub = run(c);
  CHECK(cub.rows == 4 * 3);
  CHECK(cub.results["levels"].size() == 4);
  CHECK(cub.results["levels"][0]["points"] == 8);  // smolyak_cubature(2, 2) knots
  bool exact_passed = false;
  for (const auto& ch : cub.checks)
    if (ch.name == "exact_on_hyperbolic_cross") exact_passed = ch.passed;
  CHECK(exact_passed);

  auto o = preset("oracle-l2");
  o.box = {5, 5};
  o.m_max = 20;
  o.seeds = {1, 2, 3, 4};
  const auto l2 = run(o);
  CHECK(l2.rows == 4 * 20);
  CHECK(l2.exit_code() == 0);
  o.t = 0.5;
  const auto weak = run(o);
  CHECK(weak.checks.size() == 1);  // dominance only
  CHECK(weak.checks[0].passed);

  auto lb = preset("oracle-lebesgue");
  lb.seeds = {1, 2, 3};
  const auto leb = run(lb);
  CHECK(leb.rows == 3);
  CHECK(leb.checks[0].name == "oracle_dominance");
  CHECK(leb.checks[0].passed);
  CHECK(leb.checks[1].severity == Severity::Monitor);
  lb.tol.monitor_ratio = -1.0;  // every seed breaches
  CHECK(run(lb).exit_code() == 2);
}
