#pragma once

// Seeded Monte Carlo experiment driver: SNR sweeps of the average secrecy
// rate per power-allocation method, beta profiles, and CSV / plot-script
// output.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ssm/channel_model.hpp"
#include "ssm/errors.hpp"
#include "ssm/info_metrics.hpp"
#include "ssm/pa_strategies.hpp"
#include "ssm/rng.hpp"

namespace ssm {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Method {
  enum class Kind { es, co, mpsan, fixed };
  Kind kind = Kind::es;
  double beta = 0.0;  // only for Kind::fixed

  static Method es() { return {Kind::es, 0.0}; }
  static Method co() { return {Kind::co, 0.0}; }
  static Method mpsan() { return {Kind::mpsan, 0.0}; }
  static Method fixed(double b) {
    check_beta(b);
    return {Kind::fixed, b};
  }

  std::string label() const {
    switch (kind) {
      case Kind::es: return "es";
      case Kind::co: return "co";
      case Kind::mpsan: return "mpsan";
      case Kind::fixed: return "fixed:" + format_double(beta);
    }
    return "?";
  }

  /// Parses "es", "co", "mpsan" or "fixed:<beta>".
  static Method parse(std::string_view text) {
    if (text == "es") return es();
    if (text == "co") return co();
    if (text == "mpsan") return mpsan();
    constexpr std::string_view prefix = "fixed:";
    if (text.substr(0, prefix.size()) == prefix) {
      const std::string_view num = text.substr(prefix.size());
      double b = 0.0;
      const auto res = std::from_chars(num.data(), num.data() + num.size(), b);
      if (res.ec != std::errc() || res.ptr != num.data() + num.size())
        throw ConfigError("invalid fixed beta in method '" + std::string(text) + "'");
      if (!(b >= 0.0 && b <= 1.0))
        throw ConfigError("fixed beta must lie in [0, 1] in method '" + std::string(text) + "'");
      return fixed(b);
    }
    throw ConfigError("unknown method '" + std::string(text) + "' (expected es, co, mpsan or fixed:<beta>)");
  }
};

struct ExperimentSpec {
  SystemConfig cfg;  // noise variances are overwritten per SNR point
  Modulation modulation = Modulation::psk;
  std::vector<Method> methods = {Method::es(),         Method::co(),          Method::mpsan(),
                                 Method::fixed(0.1),   Method::fixed(0.25),   Method::fixed(0.5)};
  std::vector<double> snr_db_grid = {0.0, 5.0, 10.0, 15.0, 20.0};
  int trials = 100;
  int n_samp = kDefaultMiSamples;
  std::uint64_t seed = 1;
  EsSettings es;
  CoSettings co;
  std::string out_path = "sweep.csv";
  std::string plot_script_path;
  bool beta_profile = false;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const {
    cfg.validate();
    if (cfg.n_t <= cfg.n_r) throw ConfigError("null-space AN needs n_t > n_r");
    if (methods.empty()) throw ConfigError("at least one method is required");
    if (snr_db_grid.empty()) throw ConfigError("SNR grid must not be empty");
    for (double s : snr_db_grid)
      if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (n_samp < 1) throw ConfigError("n_samp must be >= 1");
    es.validate();
    co.validate();
  }
};

/// Config with P and equal noise variances for SNR(dB) = 10 log10(P / sigma^2).
inline SystemConfig config_at_snr(SystemConfig cfg, double snr_db) {
  const double sigma2 = cfg.p / std::pow(10.0, snr_db / 10.0);
  cfg.sigma2_b = sigma2;
  cfg.sigma2_e = sigma2;
  return cfg;
}

inline TransmitAlphabet alphabet_for(const ExperimentSpec& spec) {
  return build_alphabet(spec.cfg, build_constellation(spec.modulation, spec.cfg.m));
}

/// Seed tree: root -> SNR index -> trial index; the trial stream then feeds
/// substream 0 (channel), 1 (ES common random numbers), 2 (final SR estimate).
inline RngStream trial_stream(std::uint64_t seed, std::size_t snr_index, std::size_t trial) {
  return RngStream(seed).substream(snr_index).substream(trial);
}

struct SweepRecord {
  double snr_db = 0.0;
  std::string method;
  double mean_beta = 0.0;
  double mean_sr = 0.0;
  double sr_std_error = 0.0;
  double mean_iterations = 0.0;
  int trials = 0;
};

namespace detail {

/// Runs job(i) for i in [0, n) over a fixed worker pool. Results must be
/// written into per-index slots so reduction order stays fixed.
template <class Job>
void parallel_for(std::size_t n, int threads, Job&& job) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
    });
  }
}

struct TrialOutcome {
  bool failed = false;
  std::vector<double> beta;
  std::vector<double> sr;
  std::vector<double> iterations;
};

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanAndError mean_and_error(std::span<const double> v) {
  MeanAndError out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

inline void check_failure_budget(std::size_t failed, std::size_t total) {
  // more than 1% of realizations failing numerically aborts the run
  if (failed * 100 > total)
    throw FailureBudgetError(std::to_string(failed) + " of " + std::to_string(total) +
                             " channel realizations failed numerically");
}

inline PaResult optimize(const Method& method, const ChannelPair& ch, const AnProjector& t,
                         const SystemConfig& cfg, const TransmitAlphabet& alphabet, const ExperimentSpec& spec,
                         const RngStream& es_rng) {
  switch (method.kind) {
    case Method::Kind::es: {
      EsSettings es = spec.es;
      es.n_samp = spec.n_samp;
      return es_optimize(ch, t, cfg, alphabet, es, es_rng);
    }
    case Method::Kind::co: return co_optimize(ch, t, cfg, alphabet, spec.co);
    case Method::Kind::mpsan: return max_p_san_optimize(ch, t, cfg);
    case Method::Kind::fixed: return fixed_beta(method.beta);
  }
  throw ConfigError("unknown method");
}

}  // namespace detail

/// Average secrecy rate per (SNR, method). At each SNR every method sees the
/// same channel draws and the same final SR noise draws; per-realization SR
/// is clamped at zero before averaging. Realizations that fail numerically are
/// skipped for all methods and counted.
inline std::vector<SweepRecord> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const TransmitAlphabet alphabet = alphabet_for(spec);
  const std::size_t n_methods = spec.methods.size();
  std::vector<SweepRecord> records;
  std::size_t failed_total = 0;

  for (std::size_t s = 0; s < spec.snr_db_grid.size(); ++s) {
    const SystemConfig cfg = config_at_snr(spec.cfg, spec.snr_db_grid[s]);
    std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(spec.trials));

    detail::parallel_for(outcomes.size(), spec.threads, [&](std::size_t trial) {
      detail::TrialOutcome& out = outcomes[trial];
      try {
        const RngStream root = trial_stream(spec.seed, s, trial);
        RngStream ch_rng = root.substream(0);
        const ChannelPair ch = generate_channel(ch_rng, cfg);
        const AnProjector t = build_an_projector(ch.h_b, AnMode::null_space);
        for (const Method& method : spec.methods) {
          const PaResult pa = detail::optimize(method, ch, t, cfg, alphabet, spec, root.substream(1));
          const double sr =
              instantaneous_secrecy_rate(ch, t, pa.beta, cfg, alphabet, spec.n_samp, root.substream(2)).value;
          out.beta.push_back(pa.beta);
          out.sr.push_back(sr);
          out.iterations.push_back(pa.iterations);
        }
      } catch (const NumericError&) {
        out.failed = true;
      } catch (const DomainError&) {
        out.failed = true;
      }
    });

    std::size_t failed = 0;
    for (const auto& o : outcomes) failed += o.failed ? 1 : 0;
    failed_total += failed;

    for (std::size_t k = 0; k < n_methods; ++k) {
      std::vector<double> betas, srs, iters;
      for (const auto& o : outcomes) {
        if (o.failed) continue;
        betas.push_back(o.beta[k]);
        srs.push_back(o.sr[k]);
        iters.push_back(o.iterations[k]);
      }
      SweepRecord rec;
      rec.snr_db = spec.snr_db_grid[s];
      rec.method = spec.methods[k].label();
      rec.mean_beta = detail::mean_and_error(betas).mean;
      const auto sr_stats = detail::mean_and_error(srs);
      rec.mean_sr = sr_stats.mean;
      rec.sr_std_error = sr_stats.std_error;
      rec.mean_iterations = detail::mean_and_error(iters).mean;
      rec.trials = static_cast<int>(srs.size());
      records.push_back(std::move(rec));
    }
  }
  detail::check_failure_budget(failed_total, spec.snr_db_grid.size() * static_cast<std::size_t>(spec.trials));
  return records;
}

struct BetaProfile {
  std::vector<double> snr_db;
  std::vector<double> betas;
  std::vector<std::vector<double>> mean_sr;       // [snr][beta]
  std::vector<std::vector<double>> sr_std_error;  // [snr][beta]
  std::vector<double> argmax_beta;                // per SNR, ties to the smaller beta
  int trials = 0;
};

/// Profile grid {0, 1/(l+1), ..., l/(l+1)} for the ES grid size l.
inline std::vector<double> profile_grid(int grid_points) {
  std::vector<double> g{0.0};
  for (double b : es_grid(grid_points)) g.push_back(b);
  return g;
}

/// Mean SR over trials on a beta grid for each SNR. Channel and noise streams
/// match run_sweep when `snr_db_list` equals the spec's SNR grid, so a
/// profile column equals the corresponding fixed-beta sweep record.
inline BetaProfile run_beta_profile(const ExperimentSpec& spec, const std::vector<double>& snr_db_list,
                                    const std::vector<double>& betas) {
  spec.validate();
  if (snr_db_list.empty() || betas.empty()) throw ConfigError("beta profile needs SNR and beta values");
  for (double b : betas) check_beta(b);
  const TransmitAlphabet alphabet = alphabet_for(spec);

  BetaProfile prof;
  prof.snr_db = snr_db_list;
  prof.betas = betas;
  prof.trials = spec.trials;
  std::size_t failed_total = 0;

  for (std::size_t s = 0; s < snr_db_list.size(); ++s) {
    const SystemConfig cfg = config_at_snr(spec.cfg, snr_db_list[s]);
    std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(spec.trials));
    detail::parallel_for(outcomes.size(), spec.threads, [&](std::size_t trial) {
      detail::TrialOutcome& out = outcomes[trial];
      try {
        const RngStream root = trial_stream(spec.seed, s, trial);
        RngStream ch_rng = root.substream(0);
        const ChannelPair ch = generate_channel(ch_rng, cfg);
        const AnProjector t = build_an_projector(ch.h_b, AnMode::null_space);
        const RngStream sr_rng = root.substream(2);
        for (double b : betas)
          out.sr.push_back(instantaneous_secrecy_rate(ch, t, b, cfg, alphabet, spec.n_samp, sr_rng).value);
      } catch (const NumericError&) {
        out.failed = true;
      }
    });

    std::vector<double> means, errors;
    for (std::size_t k = 0; k < betas.size(); ++k) {
      std::vector<double> col;
      for (const auto& o : outcomes)
        if (!o.failed) col.push_back(o.sr[k]);
      const auto st = detail::mean_and_error(col);
      means.push_back(st.mean);
      errors.push_back(st.std_error);
    }
    for (const auto& o : outcomes) failed_total += o.failed ? 1 : 0;
    prof.argmax_beta.push_back(betas[first_argmax(means)]);
    prof.mean_sr.push_back(std::move(means));
    prof.sr_std_error.push_back(std::move(errors));
  }
  detail::check_failure_budget(failed_total, snr_db_list.size() * static_cast<std::size_t>(spec.trials));
  return prof;
}

inline constexpr std::string_view kSweepCsvHeader =
    "snr_db,method,mean_beta,mean_sr,sr_std_error,mean_iterations,trials";
inline constexpr std::string_view kProfileCsvHeader = "snr_db,beta,mean_sr,sr_std_error,trials";

inline std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    os << format_double(r.snr_db) << ',' << r.method << ',' << format_double(r.mean_beta) << ','
       << format_double(r.mean_sr) << ',' << format_double(r.sr_std_error) << ','
       << format_double(r.mean_iterations) << ',' << r.trials << '\n';
  }
  return os.str();
}

inline std::string profile_csv(const BetaProfile& prof) {
  std::ostringstream os;
  os << kProfileCsvHeader << '\n';
  for (std::size_t s = 0; s < prof.snr_db.size(); ++s)
    for (std::size_t k = 0; k < prof.betas.size(); ++k)
      os << format_double(prof.snr_db[s]) << ',' << format_double(prof.betas[k]) << ','
         << format_double(prof.mean_sr[s][k]) << ',' << format_double(prof.sr_std_error[s][k]) << ','
         << prof.trials << '\n';
  return os.str();
}

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

/// Path of `target` relative to the directory holding `from_file`.
inline std::string relative_to_file(const std::string& target, const std::string& from_file) {
  namespace fs = std::filesystem;
  const fs::path base = fs::absolute(fs::path(from_file)).lexically_normal().parent_path();
  const fs::path abs_target = fs::absolute(fs::path(target)).lexically_normal();
  const fs::path rel = abs_target.lexically_relative(base);
  return rel.empty() ? abs_target.generic_string() : rel.generic_string();
}

inline std::string python_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  detail::write_text(path, sweep_csv(records));
}

inline void write_profile_csv(const BetaProfile& prof, const std::string& path) {
  detail::write_text(path, profile_csv(prof));
}

/// Python/matplotlib script drawing one SR-vs-SNR line per method found in
/// `records`, reading the CSV at `csv_path` relative to the script location.
inline std::string plot_script(const std::vector<SweepRecord>& records, const std::string& csv_relpath) {
  std::vector<std::string> series;
  for (const auto& r : records)
    if (std::find(series.begin(), series.end(), r.method) == series.end()) series.push_back(r.method);

  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
        "# Average secrecy rate versus SNR, one line per power-allocation method.\n"
        "import csv\n"
        "import os\n"
        "\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "HERE = os.path.dirname(os.path.abspath(__file__))\n"
        "CSV_PATH = os.path.join(HERE, "
     << detail::python_string(csv_relpath)
     << ")\n"
        "SERIES = [\n";
  for (const auto& s : series) os << "    " << detail::python_string(s) << ",\n";
  os << "]\n"
        "\n"
        "\n"
        "def main():\n"
        "    with open(CSV_PATH, newline=\"\") as f:\n"
        "        rows = list(csv.DictReader(f))\n"
        "    fig, ax = plt.subplots()\n"
        "    for label in SERIES:\n"
        "        pts = sorted((float(r[\"snr_db\"]), float(r[\"mean_sr\"]), float(r[\"sr_std_error\"]))\n"
        "                     for r in rows if r[\"method\"] == label)\n"
        "        if not pts:\n"
        "            continue\n"
        "        x, y, e = zip(*pts)\n"
        "        ax.errorbar(x, y, yerr=e, marker=\"o\", capsize=3, label=label)\n"
        "    ax.set_xlabel(\"SNR (dB)\")\n"
        "    ax.set_ylabel(\"Average secrecy rate (bits/channel use)\")\n"
        "    ax.grid(True)\n"
        "    if SERIES:\n"
        "        ax.legend()\n"
        "    out = os.path.splitext(os.path.abspath(__file__))[0] + \".png\"\n"
        "    fig.savefig(out, dpi=150, bbox_inches=\"tight\")\n"
        "    print(out)\n"
        "\n"
        "\n"
        "if __name__ == \"__main__\":\n"
        "    main()\n";
  return os.str();
}

inline void emit_plot_script(const std::vector<SweepRecord>& records, const std::string& path,
                             const std::string& csv_path) {
  detail::write_text(path, plot_script(records, detail::relative_to_file(csv_path, path)));
}

/// Plot script for a beta-profile CSV: mean SR versus beta, one line per SNR.
inline std::string profile_plot_script(const BetaProfile& prof, const std::string& csv_relpath) {
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
        "# Average secrecy rate versus power-allocation factor, one line per SNR.\n"
        "import csv\n"
        "import os\n"
        "\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "HERE = os.path.dirname(os.path.abspath(__file__))\n"
        "CSV_PATH = os.path.join(HERE, "
     << detail::python_string(csv_relpath)
     << ")\n"
        "SNRS = [\n";
  for (double s : prof.snr_db) os << "    " << format_double(s) << ",\n";
  os << "]\n"
        "\n"
        "\n"
        "def main():\n"
        "    with open(CSV_PATH, newline=\"\") as f:\n"
        "        rows = list(csv.DictReader(f))\n"
        "    fig, ax = plt.subplots()\n"
        "    for snr in SNRS:\n"
        "        pts = sorted((float(r[\"beta\"]), float(r[\"mean_sr\"]))\n"
        "                     for r in rows if float(r[\"snr_db\"]) == snr)\n"
        "        if not pts:\n"
        "            continue\n"
        "        x, y = zip(*pts)\n"
        "        ax.plot(x, y, label=f\"SNR = {snr:g} dB\")\n"
        "    ax.set_xlabel(\"beta\")\n"
        "    ax.set_ylabel(\"Average secrecy rate (bits/channel use)\")\n"
        "    ax.grid(True)\n"
        "    if SNRS:\n"
        "        ax.legend()\n"
        "    out = os.path.splitext(os.path.abspath(__file__))[0] + \".png\"\n"
        "    fig.savefig(out, dpi=150, bbox_inches=\"tight\")\n"
        "    print(out)\n"
        "\n"
        "\n"
        "if __name__ == \"__main__\":\n"
        "    main()\n";
  return os.str();
}

inline void emit_profile_plot_script(const BetaProfile& prof, const std::string& path,
                                     const std::string& csv_path) {
  detail::write_text(path, profile_plot_script(prof, detail::relative_to_file(csv_path, path)));
}

}  // namespace ssm
