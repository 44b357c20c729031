#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <CLI11.hpp>

#include "rsl/asymptotics.hpp"
#include "rsl/randomwalk.hpp"
#include "rsl/tailstats.hpp"

namespace rsl::cli {
namespace {

// Seed salts so that the checks of one verify case never share draws.
enum Salt : std::uint64_t { kTkTn = 1, kSup, kBounds, kSample, kRepresentation, kCramer, kContinuity };

const std::vector<double> kIdentityGrid{0.0, 0.5, 1.0, 2.0};
const std::vector<double> kWalkGrid{0.5, 1.0, 2.0};
constexpr std::size_t kKsDraws = 100'000;

const DistributionSpec& require_law(const ExperimentConfig& c) {
  if (!c.x_law) throw ConfigError("the config must define x_law");
  return *c.x_law;
}

RecursionConfig recursion_config(const ExperimentConfig& c, const DistributionSpec& law, double p,
                                 std::uint64_t seed) {
  return RecursionConfig{p, law, seed, c.policy, 0.0};
}

StationarySample draw_sample(const ExperimentConfig& c) {
  return stationary_sample(recursion_config(c, require_law(c), c.p, c.seed), c.n, c.workers);
}

PredictOptions predict_options(const ExperimentConfig& c) {
  PredictOptions o;
  o.seed = c.seed;
  o.workers = c.workers;
  o.walk_draws = c.walk_n;
  return o;
}

AsymptoticPrediction heavy_or_predict(const ExperimentConfig& c, const StationarySample* sample) {
  const auto& law = require_law(c);
  if (!sample) {
    AsymptoticPrediction pred;
    pred.regime = classify(law, c.p);
    pred.constant = heavy_constant(c.p);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f * P(X>x)", pred.constant);
    pred.form = buf;
    return pred;
  }
  return predict(law, c.p, *sample, predict_options(c));
}

Json check(const std::string& name, bool passed, Json detail) {
  return Json{{"name", name}, {"passed", passed}, {"detail", std::move(detail)}};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cmd_classify(const ExperimentConfig& c, std::ostream& out) {
  out << to_json(classify(require_law(c), c.p)).dump(2) << "\n";
  return kOk;
}

int cmd_kappa(const ExperimentConfig& c, std::ostream& out) {
  const KappaSolution k = solve_kappa(require_law(c), c.p);
  out << fmt("kappa=%.10f", k.kappa) << "\n" << fmt("m=%.10f", k.m) << "\n";
  return kOk;
}

int cmd_constants(const ExperimentConfig& c, std::ostream& out) {
  const Regime r = classify(require_law(c), c.p);
  if (r.tag == RegimeTag::Heavy) {
    out << to_json(heavy_or_predict(c, nullptr)).dump(2) << "\n";
    return kOk;
  }
  const StationarySample s = draw_sample(c);
  out << to_json(heavy_or_predict(c, &s)).dump(2) << "\n";
  return kOk;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out) {
  const StationarySample s = draw_sample(c);
  out << write_file(c.out, "sample.csv", sample_csv(s)) << "\n";
  return kOk;
}

int cmd_tail(const ExperimentConfig& c, std::ostream& out) {
  std::string csv;
  const Json summary = build_report(c, csv);
  out << write_file(c.out, "tail.csv", csv) << "\n";
  out << "form: " << summary["form"].get<std::string>() << "\n";
  out << "stabilized: " << (summary["diagnostics"]["stabilized"].get<bool>() ? "yes" : "no") << "\n";
  return kOk;
}

int cmd_report(const ExperimentConfig& c, std::ostream& out) {
  std::string csv;
  const Json summary = build_report(c, csv);
  out << write_file(c.out, "summary.json", summary.dump(2) + "\n") << "\n";
  out << write_file(c.out, "tail.csv", csv) << "\n";
  return kOk;
}

int cmd_verify(const ExperimentConfig& c, bool have_config, std::ostream& out) {
  std::vector<VerifyCase> cases;
  if (have_config) {
    cases.push_back({"config", c.p, require_law(c)});
  } else {
    cases = default_verify_matrix();
  }
  Json all = Json::array();
  bool passed = true;
  for (const auto& vc : cases) {
    Json result = verify_case(vc, c);
    for (const auto& ch : result["checks"]) {
      out << (ch["passed"].get<bool>() ? "PASS  " : "FAIL  ") << vc.label << "  " << ch["name"].get<std::string>()
          << "\n";
    }
    passed = passed && result["passed"].get<bool>();
    all.push_back(std::move(result));
  }
  const Json doc{{"config_digest", hex64(fnv1a(canonical(c)))}, {"cases", all}, {"passed", passed}};
  out << write_file(c.out, "verify.json", doc.dump(2) + "\n") << "\n";
  out << (passed ? "verify: all checks passed" : "verify: FAILED") << "\n";
  return passed ? kOk : kVerifyFailure;
}

}  // namespace

std::vector<VerifyCase> default_verify_matrix() {
  using D = DistributionSpec;
  return {
      {"cramer", 0.5, D::difference(D::exponential(2.0), D::exponential(1.0))},
      {"heavy", 0.5, D::difference(D::pareto(2.0, 1.0), D::exponential(1.0))},
      {"intermediate", 0.5, D::difference(D::tilted_pareto(1.0, 2.0, 1.0), D::exponential(1.0))},
      {"continuity", 1.0, D::difference(D::tilted_pareto(1.0, 6.0, 1.0), D::exponential(0.5))},
  };
}

Json verify_case(const VerifyCase& vc, const ExperimentConfig& c) {
  const std::uint64_t seed = c.seed;
  const std::vector<double>& walk_grid = c.grid.empty() ? kWalkGrid : c.grid;
  Json checks = Json::array();

  if (vc.p > 0.0 && vc.p < 1.0) {
    const auto tk = verify_tk_tn_identity(vc.p, vc.law, c.grid.empty() ? kIdentityGrid : c.grid, c.walk_n,
                                          derive_seed(seed, kTkTn), c.workers);
    checks.push_back(check("P(T_K > x) = P(T_N > x) / p", tk.passed, to_json(tk)));

    const auto ks = verify_tn_sup_representation(vc.p, vc.law, std::min(c.walk_n, kKsDraws),
                                                 derive_seed(seed, kSup), c.workers);
    checks.push_back(check("T_N equals the supremum of the killed walk (KS, 99%)", ks.passed, to_json(ks)));

    const auto bounds =
        verify_stochastic_bounds(recursion_config(c, vc.law, vc.p, derive_seed(seed, kBounds)), walk_grid, c.n,
                                 c.workers);
    checks.push_back(check("(T_K - W')^+ <= W <= T_K in survival order", bounds.passed, to_json(bounds)));

    const StationarySample s =
        stationary_sample(recursion_config(c, vc.law, vc.p, derive_seed(seed, kSample)), c.n, c.workers);
    const auto rep =
        verify_representation(s, vc.law, vc.p, walk_grid, c.n, derive_seed(seed, kRepresentation), c.workers);
    checks.push_back(check("P(W > x) equals its killed-walk representation", rep.passed, to_json(rep)));

    bool cramer = false;
    Regime regime{RegimeTag::Heavy};
    try {
      regime = classify(vc.law, vc.p);
      cramer = regime.tag == RegimeTag::Cramer;
    } catch (const RegimeError&) {
    }
    if (cramer) {
      const auto cc =
          cramer_constant(s, vc.law, vc.p, regime.kappa, regime.m, derive_seed(seed, kCramer), c.workers);
      const double z = joint_z(cc.representation.value, cc.representation.se, cc.goldie.value, cc.goldie.se);
      Json detail = to_json(cc);
      detail["z"] = z;
      checks.push_back(check("Cramer constant: representation form = Goldie integral", std::abs(z) <= kDefaultZ,
                             std::move(detail)));
    }
  }

  if (vc.p == 1.0) {
    const TailClass tc = tail_class(vc.law);
    if (tc.kind == TailClass::Kind::SGamma && mgf(vc.law, tc.gamma) < 1.0) {
      const StationarySample s =
          stationary_sample(recursion_config(c, vc.law, 1.0, derive_seed(seed, kSample)), c.n, c.workers);
      const auto cont = continuity_identity(s, vc.law, tc.gamma, derive_seed(seed, kContinuity));
      checks.push_back(check("p = 1: P(X + W + E_gamma <= 0) = E[exp(gamma W)] (1 - phi(gamma))", cont.pass,
                             to_json(cont)));
    }
  }

  bool passed = true;
  for (const auto& ch : checks) passed = passed && ch["passed"].get<bool>();
  return Json{{"label", vc.label}, {"law", describe(vc.law)}, {"p", vc.p}, {"checks", checks}, {"passed", passed}};
}

Json build_report(const ExperimentConfig& c, std::string& tail_csv_text) {
  const auto& law = require_law(c);
  const StationarySample sample = draw_sample(c);
  const AsymptoticPrediction pred = predict(law, c.p, sample, predict_options(c));
  const std::vector<double> grid =
      c.grid.empty() ? quantile_grid(sample.values, default_quantile_levels()) : c.grid;
  const TailCurve curve = empirical_tail(sample, grid);
  const RatioDiagnostic diag = ratio_diagnostic(curve, pred, law);
  tail_csv_text = tail_csv(curve, diag);

  Json ledger = Json::array();
  Json slope_json = nullptr;
  if (diag.grid.size() >= 3) {
    ledger.push_back(Json{{"check", "ratio CIs of the last three grid points overlap"}, {"pass", diag.stabilized}});
    try {
      const SlopeFit slope = log_ratio_slope(diag, 3);
      slope_json = to_json(slope);
      ledger.push_back(
          Json{{"check", "log-ratio slope within 2 SE of zero"}, {"pass", std::abs(slope.slope) < 2.0 * slope.se}});
    } catch (const InsufficientDataError&) {
    }
  }
  if (pred.bounds) {
    const double upper_z = joint_z(pred.constant, pred.constant_se, pred.bounds->upper, 0.0);
    ledger.push_back(Json{{"check", "constant <= upper bound within SE"}, {"pass", upper_z <= kDefaultZ}});
    if (pred.bounds->lower) {
      const double lower_z =
          joint_z(pred.bounds->lower->value, pred.bounds->lower->se, pred.constant, pred.constant_se);
      ledger.push_back(Json{{"check", "lower bound C_T <= constant within joint SE"}, {"pass", lower_z <= kDefaultZ}});
    }
  }

  Json notes = Json::array();
  for (const auto& n : diag.notes) notes.push_back(n);
  Json summary;
  summary["config"] = Json{{"digest", hex64(fnv1a(canonical(c)))},
                           {"p", c.p},
                           {"law", describe(law)},
                           {"seed", c.seed},
                           {"n", c.n},
                           {"walk_n", c.walk_n},
                           {"policy", describe(c.policy)}};
  summary["sample"] =
      Json{{"n", sample.values.size()}, {"effective_n", sample.effective_n}, {"n_cycles", sample.n_cycles}};
  summary["regime"] = to_string(pred.regime.tag);
  summary["prediction"] = to_json(pred);
  summary["form"] = pred.form;
  summary["diagnostics"] = Json{{"grid", diag.grid},
                                {"ratio", diag.ratio},
                                {"ci_lo", diag.ci_lo},
                                {"ci_hi", diag.ci_hi},
                                {"stabilized", diag.stabilized},
                                {"slope", slope_json},
                                {"notes", notes}};
  summary["ledger"] = ledger;
  return summary;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and tail asymptotics for the random-sign Lindley recursion", "rsl"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  unsigned workers = 1;
  std::string out_dir;
  std::string grid;
  std::vector<CLI::Option*> flags;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    flags.push_back(sub->add_option("--config", config_path, "YAML experiment file"));
    flags.push_back(sub->add_option("--seed", seed, "Master seed"));
    flags.push_back(sub->add_option("--n", n, "Stationary sample size"));
    flags.push_back(sub->add_option("--workers", workers, "Worker threads (affects wall time only)"));
    flags.push_back(sub->add_option("--out", out_dir, "Output directory"));
    flags.push_back(sub->add_option("--grid", grid, "Comma-separated x grid"));
    return sub;
  };
  CLI::App* classify_cmd = add("classify", "Print the tail regime");
  CLI::App* kappa_cmd = add("kappa", "Print the Cramer root kappa and m = E[X exp(kappa X)]");
  CLI::App* constants_cmd = add("constants", "Print the regime constant with SE and bounds");
  CLI::App* simulate_cmd = add("simulate", "Write a stationary sample to sample.csv");
  CLI::App* tail_cmd = add("tail", "Write the empirical tail and ratio diagnostic to tail.csv");
  CLI::App* verify_cmd = add("verify", "Run the identity checks and write verify.json");
  CLI::App* report_cmd = add("report", "Write summary.json and tail.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  auto given = [&](const CLI::App* sub, const char* name) { return sub->get_option(name)->count() > 0; };
  const CLI::App* sub = app.get_subcommands().front();

  try {
    const bool have_config = given(sub, "--config");
    ExperimentConfig config = have_config ? load_config(config_path) : ExperimentConfig{};
    Overrides o;
    if (given(sub, "--seed")) o.seed = seed;
    if (given(sub, "--n")) o.n = n;
    if (given(sub, "--workers")) o.workers = workers;
    if (given(sub, "--out")) o.out = out_dir;
    if (given(sub, "--grid")) o.grid = grid;
    apply(config, o);
    if (!have_config && sub != verify_cmd) throw ConfigError(sub->get_name() + ": --config is required");

    if (sub == classify_cmd) return cmd_classify(config, out);
    if (sub == kappa_cmd) return cmd_kappa(config, out);
    if (sub == constants_cmd) return cmd_constants(config, out);
    if (sub == simulate_cmd) return cmd_simulate(config, out);
    if (sub == tail_cmd) return cmd_tail(config, out);
    if (sub == verify_cmd) return cmd_verify(config, have_config, out);
    if (sub == report_cmd) return cmd_report(config, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const StabilityError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const UnsupportedTiltError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kRegimeFailure;
  }
  return kOk;
}

}  // namespace rsl::cli
