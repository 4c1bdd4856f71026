#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pasafl/scenario.hpp"

namespace pasafl {

namespace fs = std::filesystem;

/// Filesystem failures, tagged with the path involved.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline const char* kMetricsHeader =
    "step,do_id,utility_u,pending_q,urgency_Q,accepted_kappa,completed_theta,subdelegated_s,price_p,reputation_r";

/// 9 significant digits, the fixed precision of every metrics file.
inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// The value a reader of the CSV will see.
inline double as_written(double v) { return std::strtod(fmt_real(v).c_str(), nullptr); }

inline std::string csv_row(const MetricsRecord& r) {
  std::string s;
  s.reserve(96);
  s += std::to_string(r.step);
  s += ',';
  s += std::to_string(r.do_id);
  s += ',';
  s += fmt_real(r.utility);
  s += ',';
  s += fmt_real(r.pending);
  s += ',';
  s += fmt_real(r.urgency);
  s += ',';
  s += std::to_string(r.accepted);
  s += ',';
  s += std::to_string(r.completed);
  s += ',';
  s += std::to_string(r.subdelegated);
  s += ',';
  s += fmt_real(r.price);
  s += ',';
  s += fmt_real(r.reputation);
  return s;
}

/// Running aggregates over one seed's records, fed the values as written.
struct SeedAccumulator {
  double utility = 0.0;
  double backlog = 0.0;
  double price = 0.0;
  std::int64_t accepting = 0;
  std::int64_t rows = 0;

  void add(double u, double q, double p, int kappa) {
    utility += u;
    backlog += q;
    price += p;
    accepting += kappa > 0 ? 1 : 0;
    ++rows;
  }
};

struct SeedResult {
  std::uint64_t seed = 0;
  double mean_utility = 0.0;
  double mean_backlog = 0.0;
  double mean_price = 0.0;
  double acceptance_rate = 0.0; // share of owner-steps that admitted at least one task
  std::int64_t steps = 0;
  int conservation_violations = 0;
  int drift_violations = 0;
  int invalid_states = 0;
  int admission_violations = 0;
  std::string csv_path;

  static SeedResult from(std::uint64_t seed, const SeedAccumulator& a) {
    SeedResult r;
    r.seed = seed;
    const double n = a.rows > 0 ? static_cast<double>(a.rows) : 1.0;
    r.mean_utility = a.utility / n;
    r.mean_backlog = a.backlog / n;
    r.mean_price = a.price / n;
    r.acceptance_rate = static_cast<double>(a.accepting) / n;
    return r;
  }
};

struct PolicySummary {
  std::string policy;
  std::vector<SeedResult> seeds;
  double mean_utility = 0.0;
  double std_utility = 0.0; // sample std across seeds
  double mean_backlog = 0.0;
  double mean_price = 0.0;
  double acceptance_rate = 0.0;

  void aggregate() {
    const double n = static_cast<double>(seeds.size());
    mean_utility = mean_backlog = mean_price = acceptance_rate = 0.0;
    for (const auto& s : seeds) {
      mean_utility += s.mean_utility;
      mean_backlog += s.mean_backlog;
      mean_price += s.mean_price;
      acceptance_rate += s.acceptance_rate;
    }
    mean_utility /= n;
    mean_backlog /= n;
    mean_price /= n;
    acceptance_rate /= n;
    double ss = 0.0;
    for (const auto& s : seeds) ss += (s.mean_utility - mean_utility) * (s.mean_utility - mean_utility);
    std_utility = seeds.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
};

struct RunSummary {
  std::vector<PolicySummary> rows;

  const PolicySummary& row(const std::string& policy) const {
    for (const auto& r : rows)
      if (r.policy == policy) return r;
    throw std::out_of_range("no summary row for " + policy);
  }
};

struct RunOptions {
  std::int64_t seed_offset = 0;
  bool quiet = true;
  bool write_files = true;
  std::ostream* log = nullptr;
  // Called for every step of every seed, e.g. for extra property checks.
  std::function<void(std::uint64_t seed, const World&, const StepOutcome&)> on_step;
};

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string policy_label(const std::vector<std::string>& assignment) {
  if (assignment.size() == 1) return assignment.front();
  for (const auto& p : assignment)
    if (p != assignment.front()) return "mixed";
  return assignment.front();
}

/// Runs every seed of `config` with the given per-owner assignment, writing
/// one metrics CSV and one manifest per seed under <output_dir>/<label>/.
inline PolicySummary run_policy(const ScenarioConfig& config, const std::vector<std::string>& assignment,
                                const RunOptions& opt = {}) {
  PolicySummary summary;
  summary.policy = policy_label(assignment);
  const fs::path dir = fs::path(config.output_dir) / summary.policy;
  if (opt.write_files) ensure_dir(dir);

  for (std::uint64_t base_seed : config.seeds) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(opt.seed_offset);
    World world = build_world(config, seed, assignment);
    std::string csv;
    if (opt.write_files) {
      csv.reserve(static_cast<std::size_t>(config.horizon_T) * config.n_dos * 64);
      csv += kMetricsHeader;
      csv += '\n';
    }
    SeedAccumulator acc;
    int conservation = 0, drift = 0, invalid = 0, admission = 0;
    for (std::int64_t t = 0; t < config.horizon_T; ++t) {
      const auto out = world.step();
      if (!out.audit.conservation_ok()) ++conservation;
      drift += out.audit.drift_violations;
      if (!out.audit.states_valid || !out.audit.decisions_valid) ++invalid;
      if (!out.audit.admissions_within_cap) ++admission;
      for (const auto& rec : out.records) {
        acc.add(as_written(rec.utility), as_written(rec.pending), as_written(rec.price), rec.accepted);
        if (opt.write_files) {
          csv += csv_row(rec);
          csv += '\n';
        }
      }
      if (opt.on_step) opt.on_step(seed, world, out);
    }
    SeedResult res = SeedResult::from(seed, acc);
    res.steps = config.horizon_T;
    res.conservation_violations = conservation;
    res.drift_violations = drift;
    res.invalid_states = invalid;
    res.admission_violations = admission;
    if (opt.write_files) {
      const fs::path csv_path = dir / ("seed_" + std::to_string(seed) + ".csv");
      write_text(csv_path, csv);
      res.csv_path = csv_path.string();
      nlohmann::json manifest = {{"version", kVersion},
                                 {"policy", summary.policy},
                                 {"seed", seed},
                                 {"metrics_csv", csv_path.filename().string()},
                                 {"config", config_to_json(config)}};
      manifest["config"]["policy"] = assignment.size() == 1 ? nlohmann::json(assignment.front()) : nlohmann::json(assignment);
      write_text(dir / ("manifest_seed_" + std::to_string(seed) + ".json"), manifest.dump(2) + "\n");
    }
    if (!opt.quiet && opt.log)
      *opt.log << summary.policy << " seed " << seed << ": mean utility " << fmt_real(res.mean_utility)
               << ", mean backlog " << fmt_real(res.mean_backlog) << "\n";
    summary.seeds.push_back(res);
  }
  summary.aggregate();
  return summary;
}

inline std::string summary_csv(const RunSummary& s) {
  std::string out = "policy,n_seeds,mean_utility,std_utility,mean_backlog,mean_price,acceptance_rate\n";
  for (const auto& r : s.rows)
    out += r.policy + "," + std::to_string(r.seeds.size()) + "," + fmt_real(r.mean_utility) + "," +
           fmt_real(r.std_utility) + "," + fmt_real(r.mean_backlog) + "," + fmt_real(r.mean_price) + "," +
           fmt_real(r.acceptance_rate) + "\n";
  return out;
}

inline std::string per_seed_csv(const RunSummary& s) {
  std::string out = "policy,seed,mean_utility,mean_backlog,mean_price,acceptance_rate\n";
  for (const auto& r : s.rows)
    for (const auto& sd : r.seeds)
      out += r.policy + "," + std::to_string(sd.seed) + "," + fmt_real(sd.mean_utility) + "," +
             fmt_real(sd.mean_backlog) + "," + fmt_real(sd.mean_price) + "," + fmt_real(sd.acceptance_rate) + "\n";
  return out;
}

inline std::string summary_text(const RunSummary& s) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %6s %12s %10s %10s %9s %9s\n", "policy", "seeds", "utility", "std",
                "backlog", "price", "accept");
  os << line;
  for (const auto& r : s.rows) {
    std::snprintf(line, sizeof line, "%-18s %6zu %12.6f %10.6f %10.4f %9.4f %9.4f\n", r.policy.c_str(),
                  r.seeds.size(), r.mean_utility, r.std_utility, r.mean_backlog, r.mean_price, r.acceptance_rate);
    os << line;
  }
  return os.str();
}

/// Runs each policy uniformly over all owners on the config's shared seeds.
inline RunSummary run_preset(const ScenarioConfig& config, const std::vector<std::string>& policies,
                             const RunOptions& opt = {}) {
  RunSummary summary;
  for (const auto& p : policies) summary.rows.push_back(run_policy(config, {p}, opt));
  if (opt.write_files) {
    ensure_dir(config.output_dir);
    write_text(fs::path(config.output_dir) / "summary.csv", summary_csv(summary));
    write_text(fs::path(config.output_dir) / "per_seed.csv", per_seed_csv(summary));
    write_text(fs::path(config.output_dir) / "resolved_config.json", config_to_json(config).dump(2) + "\n");
  }
  return summary;
}

/// The config's own policy assignment.
inline RunSummary run_experiment(const ScenarioConfig& config, const RunOptions& opt = {}) {
  RunSummary summary;
  summary.rows.push_back(run_policy(config, config.policy, opt));
  if (opt.write_files) {
    ensure_dir(config.output_dir);
    write_text(fs::path(config.output_dir) / "summary.csv", summary_csv(summary));
    write_text(fs::path(config.output_dir) / "per_seed.csv", per_seed_csv(summary));
    write_text(fs::path(config.output_dir) / "resolved_config.json", config_to_json(config).dump(2) + "\n");
  }
  return summary;
}

inline std::vector<std::string> compare_preset() {
  std::vector<std::string> out{"pas-afl"};
  for (auto n : kBaselineNames) out.emplace_back(n);
  return out;
}

inline std::vector<std::string> ablation_preset() {
  std::vector<std::string> out{"pas-afl"};
  for (auto n : kAblationNames) out.emplace_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

struct PlotSeries {
  std::string policy;
  std::vector<double> utility; // per step, mean over owners and seeds
  std::vector<double> backlog;
  std::vector<double> seed_means;
};

/// Reads <dir>/<policy>/seed_*.csv and writes under <dir>/plot/:
/// utility_vs_time.csv, backlog_vs_time.csv, policy_comparison.csv.
inline std::vector<PlotSeries> emit_plot_data(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("missing artifact: '" + dir.string() + "' is not a directory");
  std::map<std::string, std::vector<fs::path>> files;
  for (const auto& sub : fs::directory_iterator(dir)) {
    if (!sub.is_directory() || sub.path().filename() == "plot") continue;
    for (const auto& f : fs::directory_iterator(sub.path())) {
      const auto name = f.path().filename().string();
      if (f.is_regular_file() && name.rfind("seed_", 0) == 0 && f.path().extension() == ".csv")
        files[sub.path().filename().string()].push_back(f.path());
    }
  }
  if (files.empty()) throw IoError("missing artifact: no seed_*.csv metrics under '" + dir.string() + "'");

  std::vector<PlotSeries> series;
  for (auto& [policy, paths] : files) {
    std::sort(paths.begin(), paths.end());
    PlotSeries ps;
    ps.policy = policy;
    std::vector<double> u_sum, q_sum;
    std::vector<std::int64_t> count;
    for (const auto& p : paths) {
      std::ifstream in(p);
      if (!in) throw IoError("cannot read '" + p.string() + "'");
      std::string line;
      std::getline(in, line);
      if (line != kMetricsHeader) throw IoError("unexpected header in '" + p.string() + "'");
      double seed_u = 0.0;
      std::int64_t rows = 0;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 10) throw IoError("malformed row in '" + p.string() + "'");
        const auto step = static_cast<std::size_t>(std::stoll(cells[0]));
        const double u = std::strtod(cells[2].c_str(), nullptr);
        const double q = std::strtod(cells[3].c_str(), nullptr);
        if (step >= u_sum.size()) {
          u_sum.resize(step + 1, 0.0);
          q_sum.resize(step + 1, 0.0);
          count.resize(step + 1, 0);
        }
        u_sum[step] += u;
        q_sum[step] += q;
        ++count[step];
        seed_u += u;
        ++rows;
      }
      ps.seed_means.push_back(rows > 0 ? seed_u / static_cast<double>(rows) : 0.0);
    }
    for (std::size_t t = 0; t < u_sum.size(); ++t) {
      const double n = count[t] > 0 ? static_cast<double>(count[t]) : 1.0;
      ps.utility.push_back(u_sum[t] / n);
      ps.backlog.push_back(q_sum[t] / n);
    }
    series.push_back(std::move(ps));
  }

  const fs::path out = dir / "plot";
  ensure_dir(out);
  std::string util = "policy,step,mean_utility\n", back = "policy,step,mean_pending_q\n";
  std::string bars = "policy,n_seeds,mean_utility,std_utility,mean_pending_q\n";
  for (const auto& ps : series) {
    for (std::size_t t = 0; t < ps.utility.size(); ++t) {
      util += ps.policy + "," + std::to_string(t) + "," + fmt_real(ps.utility[t]) + "\n";
      back += ps.policy + "," + std::to_string(t) + "," + fmt_real(ps.backlog[t]) + "\n";
    }
    const double n = static_cast<double>(ps.seed_means.size());
    double mean = 0.0, ss = 0.0, qmean = 0.0;
    for (double m : ps.seed_means) mean += m;
    mean /= n;
    for (double m : ps.seed_means) ss += (m - mean) * (m - mean);
    for (double q : ps.backlog) qmean += q;
    qmean /= std::max<double>(1.0, static_cast<double>(ps.backlog.size()));
    const double sd = ps.seed_means.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    bars += ps.policy + "," + std::to_string(ps.seed_means.size()) + "," + fmt_real(mean) + "," + fmt_real(sd) + "," +
            fmt_real(qmean) + "\n";
  }
  write_text(out / "utility_vs_time.csv", util);
  write_text(out / "backlog_vs_time.csv", back);
  write_text(out / "policy_comparison.csv", bars);
  return series;
}

}  // namespace pasafl
