#include "starcov/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "starcov/detection.hpp"
#include "starcov/rng.hpp"

namespace starcov {

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::None: return "none";
    case SweepVariable::PMax: return "P_max";
    case SweepVariable::Epsilon: return "epsilon";
    case SweepVariable::N: return "N";
    case SweepVariable::M: return "M";
  }
  return "none";
}

std::string to_string(Scheme s) {
  return s == Scheme::StarRis ? "star-ris" : "conventional-ris";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
  if (s == "none") return SweepVariable::None;
  if (s == "P_max") return SweepVariable::PMax;
  if (s == "epsilon") return SweepVariable::Epsilon;
  if (s == "N") return SweepVariable::N;
  if (s == "M") return SweepVariable::M;
  throw std::invalid_argument("unknown sweep variable: " + s);
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "star-ris" || s == "star") return Scheme::StarRis;
  if (s == "conventional-ris" || s == "ris") return Scheme::ConventionalRis;
  throw std::invalid_argument("unknown scheme: " + s);
}

void ExperimentConfig::validate() const {
  base.validate();
  tol.validate();
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (sweep_var != SweepVariable::None && sweep_values.empty())
    throw std::invalid_argument("sweep value list must be nonempty");
}

// ---------------------------------------------------------------------------
// Config parsing (dB conversions happen here and nowhere else)
// ---------------------------------------------------------------------------

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SystemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  SystemConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "M") c.M = std::stoi(val);
      else if (key == "N") c.N = std::stoi(val);
      else if (key == "P_max") c.P_max = db_to_linear(std::stod(val));       // dBW
      else if (key == "P_j_max") c.P_j_max = db_to_linear(std::stod(val));   // dBW
      else if (key == "sigma_b2") c.sigma_b2 = dbm_to_watt(std::stod(val));  // dBm
      else if (key == "sigma_c2") c.sigma_c2 = dbm_to_watt(std::stod(val));
      else if (key == "sigma_w2") c.sigma_w2 = dbm_to_watt(std::stod(val));
      else if (key == "phi_sic") c.phi_sic = db_to_linear(std::stod(val));   // dB
      else if (key == "rho0") c.rho0 = db_to_linear(std::stod(val));         // dB
      else if (key == "alpha") c.alpha = std::stod(val);
      else if (key == "d_ar") c.d_ar = std::stod(val);
      else if (key == "d_rb") c.d_rb = std::stod(val);
      else if (key == "d_rc") c.d_rc = std::stod(val);
      else if (key == "d_rw") c.d_rw = std::stod(val);
      else if (key == "epsilon") c.epsilon = std::stod(val);
      else if (key == "iota") c.iota = std::stod(val);
      else if (key == "kappa") c.kappa = std::stod(val);
      else if (key == "R_star") c.R_star = std::stod(val);
      else if (key == "rng_seed") c.rng_seed = std::stoull(val);
      else throw std::runtime_error("unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

BaselineSystem ris_baseline_channels(const SystemConfig& cfg, std::uint64_t seed) {
  if (cfg.N % 2 != 0)
    throw std::domain_error("ris_baseline_channels: N must be even for the N/2 split");
  BaselineSystem b;
  b.channels = generate_channels(cfg, seed);
  b.frozen_beta_r = VectorXd::Zero(cfg.N);
  b.frozen_beta_r.head(cfg.N / 2).setOnes();  // reflect-only half first
  return b;
}

namespace {

SystemConfig apply_sweep_value(const SystemConfig& base, SweepVariable var, double v) {
  SystemConfig c = base;
  switch (var) {
    case SweepVariable::None: break;
    case SweepVariable::PMax: c.P_max = v; break;
    case SweepVariable::Epsilon: c.epsilon = v; break;
    case SweepVariable::N: c.N = static_cast<int>(std::lround(v)); break;
    case SweepVariable::M: c.M = static_cast<int>(std::lround(v)); break;
  }
  return c;
}

std::uint64_t realization_seed(std::uint64_t base_seed, int realization) {
  return splitmix64(splitmix64(base_seed) + static_cast<std::uint64_t>(realization));
}

ResultRecord run_one(const ExperimentConfig& cfg, double value, int realization) {
  ResultRecord rec;
  rec.scheme = to_string(cfg.scheme);
  rec.sweep_value = value;
  rec.realization = realization;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SystemConfig c = apply_sweep_value(cfg.base, cfg.sweep_var, value);
    c.rng_seed = realization_seed(cfg.seed, realization);
    OptimizationResult r;
    if (cfg.scheme == Scheme::ConventionalRis) {
      const BaselineSystem b = ris_baseline_channels(c, c.rng_seed);
      r = algorithm2_alternating(c, b.channels, cfg.tol, &b.frozen_beta_r);
    } else {
      const ChannelSet ch = generate_channels(c, c.rng_seed);
      r = algorithm2_alternating(c, ch, cfg.tol);
    }
    rec.R_bb = r.R_bb;
    rec.feasible = r.feasible;
    rec.converged = r.converged;
    rec.iterations = r.iterations;
  } catch (const std::exception&) {
    rec.feasible = false;  // per-realization failures are recorded, not fatal
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> values = cfg.sweep_values;
  if (cfg.sweep_var == SweepVariable::None && values.empty()) values.push_back(0.0);
  std::vector<ResultRecord> out;
  out.reserve(values.size() * static_cast<size_t>(cfg.realizations));
  for (double v : values)
    for (int i = 0; i < cfg.realizations; ++i) out.push_back(run_one(cfg, v, i));
  return out;
}

TightnessStats verify_dep_bound_tightness(const ExperimentConfig& cfg, int realizations) {
  cfg.validate();
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  TightnessStats st;
  double gap_sum = 0.0;
  for (int i = 0; i < realizations; ++i) {
    ResultRecord rec;
    rec.scheme = to_string(cfg.scheme);
    rec.sweep_value = cfg.base.epsilon;
    rec.realization = i;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SystemConfig c = cfg.base;
      c.rng_seed = realization_seed(cfg.seed, i);
      const ChannelSet ch = generate_channels(c, c.rng_seed);
      const OptimizationResult r = algorithm2_alternating(c, ch, cfg.tol);
      rec.R_bb = r.R_bb;
      rec.feasible = r.feasible;
      rec.converged = r.converged;
      rec.iterations = r.iterations;
      if (r.feasible) {
        const AsymptoticParams ap = asymptotic_dep_params(ch, r.ris, r.bf);
        const double lb =
            avg_min_dep_lower_bound(ap, r.bf.varpi_b(), r.bf.varpi_c(), c.P_j_max);
        const double exact =
            avg_min_dep_quadrature(ap, r.bf.varpi_b(), r.bf.varpi_c(), c.P_j_max);
        rec.eps_a = 1.0 - lb;
        rec.eps_r = 1.0 - exact;
      }
    } catch (const std::exception&) {
      rec.feasible = false;
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rec.feasible) {
      gap_sum += std::abs(rec.eps_r - rec.eps_a);
      ++st.successes;
    } else {
      ++st.failures;
    }
    st.records.push_back(rec);
  }
  st.mean_gap = st.successes > 0 ? gap_sum / st.successes : 0.0;
  return st;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

const char* kTableHeader =
    "scheme,sweep_value,realization,R_bb,feasible,converged,iterations,wall_time_s,eps_r,eps_a";

std::string format_record(const ResultRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g,%d,%d,%d,%.6g,%.17g,%.17g",
                r.scheme.c_str(), r.sweep_value, r.realization, r.R_bb, r.feasible ? 1 : 0,
                r.converged ? 1 : 0, r.iterations, r.wall_time_s, r.eps_r, r.eps_a);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

std::vector<std::string> emit_results(const std::vector<ResultRecord>& records,
                                      const std::string& out_dir) {
  if (records.empty()) throw std::invalid_argument("emit_results: no records");
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;

  {
    auto f = open_for_write(dir / "results.csv");
    f << kTableHeader << '\n';
    for (const ResultRecord& r : records) f << format_record(r) << '\n';
    written.push_back((dir / "results.csv").string());
  }
  {
    auto f = open_for_write(dir / "run.log");
    for (const ResultRecord& r : records) {
      f << "scheme=" << r.scheme << " value=" << r.sweep_value
        << " realization=" << r.realization << " R_bb=" << r.R_bb
        << " feasible=" << (r.feasible ? "yes" : "no")
        << " converged=" << (r.converged ? "yes" : "no")
        << " iterations=" << r.iterations << " wall_time_s=" << r.wall_time_s << '\n';
    }
    written.push_back((dir / "run.log").string());
  }

  // Plot data: per scheme, one (sweep value, mean, stderr) row per value,
  // feasible records only, sorted by sweep value.
  std::map<std::string, std::map<double, std::vector<double>>> series;
  for (const ResultRecord& r : records)
    if (r.feasible) series[r.scheme][r.sweep_value].push_back(r.R_bb);
  for (const auto& [scheme, by_value] : series) {
    const auto path = dir / ("plot_" + scheme + ".csv");
    auto f = open_for_write(path);
    f << "sweep_value,mean_R_bb,stderr_R_bb\n";
    for (const auto& [value, samples] : by_value) {
      double mean = 0.0;
      for (double s : samples) mean += s;
      mean /= static_cast<double>(samples.size());
      double var = 0.0;
      for (double s : samples) var += (s - mean) * (s - mean);
      const double se = samples.size() > 1
                            ? std::sqrt(var / (static_cast<double>(samples.size()) - 1.0) /
                                        static_cast<double>(samples.size()))
                            : 0.0;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", value, mean, se);
      f << buf;
    }
    written.push_back(path.string());
  }
  return written;
}

std::vector<ResultRecord> parse_results_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results table: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTableHeader)
    throw std::runtime_error(path + ": unexpected header");
  std::vector<ResultRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    ResultRecord r;
    r.scheme = fields[0];
    r.sweep_value = std::stod(fields[1]);
    r.realization = std::stoi(fields[2]);
    r.R_bb = std::stod(fields[3]);
    r.feasible = fields[4] == "1";
    r.converged = fields[5] == "1";
    r.iterations = std::stoi(fields[6]);
    r.wall_time_s = std::stod(fields[7]);
    r.eps_r = std::stod(fields[8]);
    r.eps_a = std::stod(fields[9]);
    if (r.feasible && !(r.R_bb >= 0.0))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": feasible record with negative R_bb");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace starcov
