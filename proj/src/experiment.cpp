#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include "htband/harness.hpp"

namespace htband {

std::size_t resolve_parallelism(std::size_t requested) {
  if (requested > 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<RegretTrace> run_replications(
    const BanditInstance& instance, const PolicySpec& policy,
    std::size_t horizon, const std::vector<std::size_t>& checkpoints,
    std::uint64_t master_seed, std::size_t count, std::size_t parallelism) {
  std::vector<RegretTrace> traces(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
      try {
        traces[r] = run_replication(
            {instance, policy, horizon, derive_seed(master_seed, r),
             checkpoints});
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };

  const std::size_t workers =
      std::min(resolve_parallelism(parallelism), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return traces;
}

std::string format_double(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trace_csv(const std::string& experiment,
                      const std::vector<RegretTrace>& traces) {
  std::string out = "experiment,replication,seed,t,cumulative_regret\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto prefix = experiment + "," + std::to_string(r) + "," +
                        std::to_string(traces[r].seed) + ",";
    for (const auto& c : traces[r].checkpoints) {
      out += prefix + std::to_string(c.t) + "," + format_double(c.regret) + "\n";
    }
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "experiment,horizon,policy,mean_regret,stderr,min,max,bound_id,bound_wc\n";
  for (const auto& row : rows) {
    out += row.experiment + "," + std::to_string(row.horizon) + "," +
           row.policy + "," + format_double(row.mean_regret) + "," +
           format_double(row.stderr_regret) + "," +
           format_double(row.min_regret) + "," +
           format_double(row.max_regret) + "," + format_double(row.bound_id) +
           "," + format_double(row.bound_wc) + "\n";
  }
  return out;
}

std::string coverage_csv_header() {
  return "suite,trials,skipped,violations,empirical_rate,nominal_rate,"
         "slack_sigmas,pass\n";
}

std::string coverage_csv_row(const CoverageReport& r) {
  return r.suite + "," + std::to_string(r.trials) + "," +
         std::to_string(r.skipped) + "," + std::to_string(r.violations) + "," +
         format_double(r.empirical_rate) + "," + format_double(r.nominal_rate) +
         "," + format_double(r.slack_sigmas) + "," + (r.pass ? "1" : "0") +
         "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const RunOptions& options) {
  if (cfg.horizons.empty() || cfg.replications < 1) {
    throw ConfigError("horizons", "experiment needs horizons and replications");
  }
  const auto instance = cfg.instance.build();
  const std::size_t horizon = cfg.horizons.back();

  std::vector<std::size_t> checkpoints =
      cfg.checkpoints.empty() ? geometric_checkpoints(horizon) : cfg.checkpoints;
  checkpoints.insert(checkpoints.end(), cfg.horizons.begin(), cfg.horizons.end());
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(),
                                   [&](std::size_t t) {
                                     return t < 1 || t > horizon;
                                   }),
                    checkpoints.end());

  ExperimentSummary summary;
  summary.traces = run_replications(
      instance, cfg.policy, horizon, checkpoints, cfg.master_seed,
      cfg.replications, options.parallelism.value_or(cfg.parallelism));

  for (const auto h : cfg.horizons) {
    SummaryRow row;
    row.experiment = cfg.name;
    row.horizon = h;
    row.policy = cfg.policy.name;
    const auto n = static_cast<double>(summary.traces.size());
    double sum = 0.0;
    row.min_regret = std::numeric_limits<double>::infinity();
    row.max_regret = -std::numeric_limits<double>::infinity();
    for (const auto& trace : summary.traces) {
      const double r = trace.regret_at(h);
      sum += r;
      row.min_regret = std::min(row.min_regret, r);
      row.max_regret = std::max(row.max_regret, r);
    }
    row.mean_regret = sum / n;
    if (summary.traces.size() > 1) {
      double sq = 0.0;
      for (const auto& trace : summary.traces) {
        const double d = trace.regret_at(h) - row.mean_regret;
        sq += d * d;
      }
      row.stderr_regret = std::sqrt(sq / (n - 1.0) / n);
    }
    row.bound_id =
        theorem_bound_instance_dependent(instance, static_cast<double>(h));
    row.bound_wc = theorem_bound_worst_case(instance, static_cast<double>(h));
    summary.rows.push_back(row);
  }

  if (options.write_files) {
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw std::runtime_error("cannot create output directory " +
                               dir.string() + ": " + ec.message());
    }
    summary.trace_path = dir / (cfg.name + ".trace.csv");
    summary.summary_path = dir / (cfg.name + ".summary.csv");
    write_file(summary.trace_path, trace_csv(cfg.name, summary.traces));
    write_file(summary.summary_path, summary_csv(summary.rows));
  }
  return summary;
}

}  // namespace htband
