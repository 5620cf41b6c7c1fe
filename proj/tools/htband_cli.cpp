// htband: command-line harness for adaptive heavy-tailed bandit experiments.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error,
// 3 a verification suite failed.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "htband/harness.hpp"

namespace {

using namespace htband;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSuiteFailed = 3;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> parallelism;
  bool quiet = false;
};

ExperimentConfig load_with_overrides(const std::string& path,
                                     const GlobalFlags& flags) {
  auto cfg = load_config(path);
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    cfg.output_dir = env;
  }
  if (flags.out) {
    cfg.output_dir = *flags.out;
  }
  if (flags.seed) {
    cfg.master_seed = *flags.seed;
  }
  if (flags.parallelism) {
    cfg.parallelism = *flags.parallelism;
  }
  if (!flags.quiet) {
    for (const auto& w : cfg.warnings) {
      std::cerr << "warning: " << w << "\n";
    }
  }
  return cfg;
}

int cmd_simulate(const std::string& path, const GlobalFlags& flags) {
  const auto cfg = load_with_overrides(path, flags);
  const auto summary = run_experiment(cfg);
  if (!flags.quiet) {
    std::cout << summary_csv(summary.rows);
    std::cerr << "wrote " << summary.trace_path.string() << " and "
              << summary.summary_path.string() << "\n";
  }
  return kExitOk;
}

int cmd_bounds(const std::string& path, const GlobalFlags& flags) {
  const auto cfg = load_with_overrides(path, flags);
  const auto instance = cfg.instance.build();
  std::cout << "experiment,horizon,bound_id,bound_wc\n";
  for (const auto h : cfg.horizons) {
    const auto t = static_cast<double>(h);
    std::cout << cfg.name << "," << h << ","
              << format_double(theorem_bound_instance_dependent(instance, t))
              << "," << format_double(theorem_bound_worst_case(instance, t))
              << "\n";
  }
  return kExitOk;
}

int report(const std::vector<CoverageReport>& reports) {
  std::cout << coverage_csv_header();
  bool ok = true;
  for (const auto& r : reports) {
    std::cout << coverage_csv_row(r);
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitSuiteFailed;
}

int cmd_estimator_bench(std::size_t cases, const GlobalFlags& flags) {
  const std::uint64_t seed = flags.seed.value_or(20240501);
  const auto corpus = make_root_corpus(cases, seed);
  const auto bench = run_solver_bench(corpus, derive_seed(seed, 1));
  return report({bench.exactness, bench.doubling, bench.properties});
}

int cmd_concentration(const std::string& suite, std::size_t trials,
                      const GlobalFlags& flags) {
  const std::uint64_t seed = flags.seed.value_or(20240502);
  std::vector<CoverageReport> reports;
  if (suite == "all" || suite == "threshold-bound") {
    reports.push_back(run_default_threshold_bound(trials, derive_seed(seed, 0)));
  }
  if (suite == "all" || suite == "concentration") {
    reports.push_back(run_default_concentration(trials, derive_seed(seed, 1)));
  }
  if (suite == "all" || suite == "ucb-validity") {
    reports.push_back(run_default_ucb_validity(trials, derive_seed(seed, 2)));
  }
  return report(reports);
}

struct DemoOptions {
  std::string policy = "adarucb";
  std::size_t horizon = 20000;
  std::size_t replications = 10;
  double epsilon = 1.0;
  double u = 1.0;
  double u_alt = 16.0;
  double epsilon_alt = 1.0 / 3.0;
  double gap = 0.1;
};

int cmd_lb_demo(const DemoOptions& opt, const GlobalFlags& flags) {
  LowerBoundParams p;
  p.epsilon = opt.epsilon;
  p.u = opt.u;
  p.u_alt = opt.u_alt;
  p.epsilon_alt = opt.epsilon_alt;
  p.gap_scale = opt.gap;
  PolicySpec policy;
  policy.name = opt.policy;
  const std::uint64_t seed = flags.seed.value_or(20240503);
  std::size_t horizon = opt.horizon;
  if (policy.name == "adarucb" && horizon % 2 == 1) {
    --horizon;
    if (!flags.quiet) {
      std::cerr << "warning: odd horizon rounded down to " << horizon << "\n";
    }
  }

  std::cout << "instance,policy,horizon,epsilon,u,mean_regret,stderr,"
               "normalized_regret\n";
  std::uint64_t stream = 0;
  for (auto kind : {LowerBoundKind::UAdaptiveBase, LowerBoundKind::UAdaptiveAlt,
                    LowerBoundKind::EpsAdaptiveBase,
                    LowerBoundKind::EpsAdaptiveAlt}) {
    const auto instance = make_lb_instance(kind, p);
    const auto traces = run_replications(
        instance, policy, horizon, {horizon}, derive_seed(seed, stream++),
        opt.replications, flags.parallelism.value_or(0));
    double sum = 0.0;
    for (const auto& t : traces) {
      sum += t.final_regret;
    }
    const auto n = static_cast<double>(traces.size());
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& t : traces) {
      sq += (t.final_regret - mean) * (t.final_regret - mean);
    }
    const double var = n > 1 ? sq / (n - 1) : 0.0;
    const auto& hp = instance.params();
    const double scale = std::pow(hp.u * static_cast<double>(horizon),
                                  1.0 / (1.0 + hp.epsilon));
    std::cout << to_string(kind) << "," << policy.name << "," << horizon << ","
              << format_double(hp.epsilon) << "," << format_double(hp.u) << ","
              << format_double(mean) << "," << format_double(std::sqrt(var / n))
              << "," << format_double(mean / scale) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive heavy-tailed bandit experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t parallelism = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed override");
  auto* out_opt = app.add_option("--out", out, "Output directory override");
  auto* par_opt = app.add_option("--parallelism", parallelism,
                                 "Worker threads (0 = auto)");
  app.add_flag("--quiet", flags.quiet, "Suppress informational output");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment config");
  simulate->add_option("config", config_path, "Experiment config (YAML)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* bounds = app.add_subcommand("bounds", "Print regret bounds for a config");
  bounds->add_option("config", config_path, "Experiment config (YAML)")
      ->required()
      ->check(CLI::ExistingFile);

  std::size_t cases = 1000;
  auto* bench = app.add_subcommand("estimator-bench",
                                   "Threshold solver oracle checks");
  bench->add_option("--cases", cases, "Randomised cases")->check(CLI::PositiveNumber);

  std::string suite = "all";
  std::size_t trials = 10000;
  auto* conc = app.add_subcommand("concentration", "Coverage suites");
  conc->add_option("--suite", suite, "Which suite")
      ->check(CLI::IsMember({"all", "threshold-bound", "concentration",
                             "ucb-validity"}));
  conc->add_option("--trials", trials, "Trials per suite")
      ->check(CLI::PositiveNumber);

  DemoOptions demo;
  auto* lb = app.add_subcommand("lb-demo", "Regret on lower-bound instance pairs");
  lb->add_option("--policy", demo.policy, "Policy name")
      ->check(CLI::IsMember({"adarucb", "robustucb-tm", "uniform"}));
  lb->add_option("--horizon", demo.horizon, "Pulls per replication")
      ->check(CLI::PositiveNumber);
  lb->add_option("--replications", demo.replications, "Replications")
      ->check(CLI::PositiveNumber);
  lb->add_option("--epsilon", demo.epsilon, "Moment order");
  lb->add_option("--u", demo.u, "Moment bound");
  lb->add_option("--u-alt", demo.u_alt, "Moment bound of the alternative");
  lb->add_option("--epsilon-alt", demo.epsilon_alt,
                 "Moment order of the alternative");
  lb->add_option("--delta", demo.gap, "Construction parameter Delta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) flags.seed = seed;
  if (*out_opt) flags.out = out;
  if (*par_opt) flags.parallelism = parallelism;

  try {
    if (*simulate) return cmd_simulate(config_path, flags);
    if (*bounds) return cmd_bounds(config_path, flags);
    if (*bench) return cmd_estimator_bench(cases, flags);
    if (*conc) return cmd_concentration(suite, trials, flags);
    if (*lb) return cmd_lb_demo(demo, flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
