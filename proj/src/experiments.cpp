#include "halfheavy/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "halfheavy/keyed_stream.hpp"
#include "halfheavy/stats.hpp"

namespace halfheavy {

std::vector<cplx> default_z_grid() {
  const std::vector<cplx> upper = {{0.0, 2.0}, {1.0, 1.0}, {0.5, 0.8}, {0.0, 3.0}};
  std::vector<cplx> grid = upper;
  for (cplx z : upper) grid.push_back(std::conj(z));
  return grid;
}

void validate(const RunPlan& plan) {
  calibrate(plan.alpha);
  if (!(plan.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (plan.N_list.empty()) throw InputError("N_list is empty");
  for (auto n : plan.N_list) {
    if (n < 32) throw InputError("every N must be at least 32");
  }
  if (plan.replicates_per_N < 50) throw InputError("replicates_per_N must be at least 50");
  if (plan.z_grid.empty()) throw InputError("z_grid is empty");
  for (cplx z : plan.z_grid) {
    if (z.imag() == 0.0 || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw InputError("every grid point needs a finite, nonzero imaginary part");
    }
  }
  if (plan.threads < 1) throw InputError("threads must be at least 1");
}

EnsembleConfig ensemble_config(const RunPlan& plan, std::int64_t N) {
  EnsembleConfig cfg;
  cfg.N = N;
  cfg.dist = calibrate(plan.alpha);
  cfg.symmetry_class = plan.symmetry_class;
  cfg.mode = plan.mode;
  cfg.epsilon = plan.epsilon;
  cfg.seed = keyed::derive_seed(plan.master_seed, static_cast<std::uint64_t>(N));
  return cfg;
}

TraceTable run_ensemble(const RunPlan& plan, const TraceSink& sink) {
  validate(plan);
  struct Job {
    std::size_t n_index;
    std::int64_t rep;
  };
  std::vector<EnsembleConfig> configs;
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < plan.N_list.size(); ++k) {
    configs.push_back(ensemble_config(plan, plan.N_list[k]));
    for (std::int64_t r = 0; r < plan.replicates_per_N; ++r) jobs.push_back({k, r});
  }

  TraceTable table;
  for (auto n : plan.N_list) table[n].resize(static_cast<std::size_t>(plan.replicates_per_N));

  auto compute = [&](const Job& job) {
    const MatrixSample s = build_matrix(configs[job.n_index], job.rep);
    return spectral_trace(s, plan.z_grid);
  };
  auto commit = [&](SpectralTrace&& t) {
    if (sink) sink(t);
    table[t.N][static_cast<std::size_t>(t.replicate_index)] = std::move(t.traces);
  };

  const int workers = std::min<int>(plan.threads, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (const auto& job : jobs) commit(compute(job));
    return table;
  }

  std::vector<std::optional<SpectralTrace>> slots(jobs.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (stop.load()) return;
        const std::size_t idx = next.fetch_add(1);
        if (idx >= jobs.size()) return;
        try {
          SpectralTrace t = compute(jobs[idx]);
          std::lock_guard lock(mu);
          slots[idx] = std::move(t);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          stop.store(true);
        }
        ready.notify_all();
      }
    });
  }

  try {
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
      SpectralTrace t;
      {
        std::unique_lock lock(mu);
        ready.wait(lock, [&] { return slots[idx].has_value() || failure; });
        if (failure) std::rethrow_exception(failure);
        t = std::move(*slots[idx]);
        slots[idx].reset();
      }
      commit(std::move(t));
    }
  } catch (...) {
    stop.store(true);
    pool.clear();
    throw;
  }
  return table;
}

std::vector<cplx> traces_at(const std::vector<std::vector<cplx>>& by_replicate, std::size_t z_index) {
  std::vector<cplx> out;
  out.reserve(by_replicate.size());
  for (const auto& row : by_replicate) {
    if (z_index >= row.size()) throw InputError("z index out of range");
    out.push_back(row[z_index]);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TraceCsvWriter::TraceCsvWriter(std::filesystem::path path, const std::string& header_comment)
    : path_(std::move(path)), partial_(path_.string() + ".partial") {
  out_.open(partial_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + partial_.string() + " for writing");
  std::istringstream lines(header_comment);
  for (std::string line; std::getline(lines, line);) out_ << "# " << line << '\n';
  out_ << "replicate,N,alpha,mode,re_z,im_z,re_trace,im_trace\n";
  if (!out_) throw IoError("write failed on " + partial_.string());
}

TraceCsvWriter::~TraceCsvWriter() {
  if (!finished_ && out_.is_open()) out_.close();  // the .partial file stays as the marker
}

void TraceCsvWriter::write(const SpectralTrace& trace, double alpha, EntryMode mode) {
  const std::string prefix = std::to_string(trace.replicate_index) + "," + std::to_string(trace.N) + "," +
                             fmt17(alpha) + "," + to_string(mode) + ",";
  for (std::size_t j = 0; j < trace.z_grid.size(); ++j) {
    out_ << prefix << fmt17(trace.z_grid[j].real()) << ',' << fmt17(trace.z_grid[j].imag()) << ','
         << fmt17(trace.traces[j].real()) << ',' << fmt17(trace.traces[j].imag()) << '\n';
  }
  if (!out_) throw IoError("write failed on " + partial_.string());
}

void TraceCsvWriter::finish() {
  if (finished_) return;
  out_.flush();
  out_.close();
  if (!out_) throw IoError("write failed on " + partial_.string());
  std::error_code ec;
  std::filesystem::rename(partial_, path_, ec);
  if (ec) throw IoError("cannot rename " + partial_.string() + ": " + ec.message());
  finished_ = true;
}

// ---------------------------------------------------------------------------

double robust_variance(std::span<const cplx> traces, std::size_t blocks) {
  const std::size_t m = traces.size();
  if (m < 2 || m < blocks) throw InputError("too few replicates for the block variance");
  double mean = 0.0;
  for (cplx t : traces) mean += t.real();
  mean /= static_cast<double>(m);
  std::vector<double> sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = traces[i].real() - mean;
    sq[i] = d * d;
  }
  const double md = static_cast<double>(m);
  return stats::median_of_means(sq, blocks) * md / (md - 1.0);
}

ScalingFit fit_log_variance(const std::map<std::int64_t, double>& variances) {
  if (variances.size() < 3) throw InputError("scaling fit needs at least 3 distinct N");
  std::vector<double> x, y;
  for (const auto& [n, v] : variances) {
    if (!(v > 0.0)) throw InputError("variance estimate is not positive");
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(v));
  }
  const auto fit = stats::linear_fit(x, y);
  ScalingFit out;
  out.slope = fit.slope;
  out.stderr_ = fit.slope_stderr;
  out.intercept = fit.intercept;
  out.variances = variances;
  return out;
}

ScalingFit variance_scaling_fit(const std::map<std::int64_t, std::vector<cplx>>& traces_by_N, std::size_t blocks) {
  if (traces_by_N.size() < 3) throw InputError("scaling fit needs at least 3 distinct N");
  std::map<std::int64_t, double> variances;
  for (const auto& [n, t] : traces_by_N) {
    if (t.size() < 100) throw InputError("scaling fit needs at least 100 replicates per N");
    variances[n] = robust_variance(t, blocks);
  }
  return fit_log_variance(variances);
}

cplx empirical_covariance(std::span<const cplx> tz, std::span<const cplx> tzp, std::int64_t N, double alpha,
                          std::size_t min_replicates) {
  if (tz.size() != tzp.size()) throw InputError("trace lists differ in length");
  const std::size_t m = tz.size();
  if (m < std::max<std::size_t>(min_replicates, 2)) {
    throw InputError("covariance needs at least " + std::to_string(min_replicates) + " replicates");
  }
  cplx mean_a{0.0, 0.0}, mean_b{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    mean_a += tz[i];
    mean_b += tzp[i];
  }
  mean_a /= static_cast<double>(m);
  mean_b /= static_cast<double>(m);
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) acc += (tz[i] - mean_a) * (tzp[i] - mean_b);
  const double scale = std::pow(static_cast<double>(N), 0.5 * alpha - 2.0) / static_cast<double>(m - 1);
  return acc * scale;
}

GaussianityStats gaussianity_stats(std::span<const double> samples, std::size_t min_samples) {
  if (samples.size() < min_samples) {
    throw InputError("gaussianity check needs at least " + std::to_string(min_samples) + " samples");
  }
  const auto mom = stats::moments(samples);
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (samples[i] - mom.mean) / mom.sd;
  const double m = static_cast<double>(samples.size());
  GaussianityStats out;
  out.samples = samples.size();
  out.skewness = mom.skewness;
  out.excess_kurtosis = mom.excess_kurtosis;
  out.skewness_z = mom.skewness / std::sqrt(6.0 / m);
  out.excess_kurtosis_z = mom.excess_kurtosis / std::sqrt(24.0 / m);
  out.cdf_distance = stats::ks_distance_normal(z);
  return out;
}

// ---------------------------------------------------------------------------

bool ExperimentReport::all_pass() const {
  return std::all_of(flags.begin(), flags.end(), [](const Flag& f) { return f.pass; });
}

ScalingRow scaling_row(const TraceTable& table, const RunPlan& plan, std::size_t z_index, const Tolerances& tol) {
  std::map<std::int64_t, std::vector<cplx>> by_n;
  for (const auto& [n, reps] : table) by_n[n] = traces_at(reps, z_index);
  const auto fit = variance_scaling_fit(by_n);
  ScalingRow row;
  row.z = plan.z_grid.at(z_index);
  row.slope = fit.slope;
  row.stderr_ = fit.stderr_;
  row.target = 2.0 - 0.5 * plan.alpha;
  row.variances = fit.variances;
  row.replicates = plan.replicates_per_N;
  row.pass = std::abs(row.slope - row.target) <= tol.slope_abs;
  return row;
}

std::vector<NormalityRow> normality_rows(std::span<const cplx> traces, cplx z, std::int64_t N, double alpha,
                                         const Tolerances& tol) {
  cplx mean{0.0, 0.0};
  for (cplx t : traces) mean += t;
  mean /= static_cast<double>(traces.size());
  const double scale = std::pow(static_cast<double>(N), 0.25 * alpha - 1.0);
  std::vector<double> re, im;
  for (cplx t : traces) {
    re.push_back(scale * (t - mean).real());
    im.push_back(scale * (t - mean).imag());
  }
  std::vector<NormalityRow> out;
  for (auto* part : {&re, &im}) {
    NormalityRow row;
    row.z = z;
    row.N = N;
    row.component = part == &re ? "re" : "im";
    row.stats = gaussianity_stats(*part);
    row.pass = std::abs(row.stats.skewness_z) < tol.skewness_z && row.stats.cdf_distance < tol.cdf_distance;
    out.push_back(row);
  }
  return out;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmtz(cplx z) { return fmt("%.4g", z.real()) + (z.imag() < 0 ? "" : "+") + fmt("%.4g", z.imag()) + "i"; }

}  // namespace

std::string summary_table(const ExperimentReport& r) {
  std::ostringstream os;
  os << "alpha " << fmt("%.4g", r.alpha) << ", mode " << r.mode << ", class " << r.symmetry_class << "\n";
  if (!r.scaling_fits.empty()) {
    os << "\nvariance scaling (log Var Re Tr G vs log N)\n";
    os << "  z              slope     stderr    target   pass\n";
    for (const auto& s : r.scaling_fits) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-14s %8.4f  %8.4f  %8.4f   %s\n", fmtz(s.z).c_str(), s.slope, s.stderr_,
                    s.target, s.pass ? "yes" : "no");
      os << line;
    }
  }
  if (!r.normality.empty()) {
    os << "\nnormalised fluctuations\n";
    os << "  z              N      part  skew_z    kurt_z    cdf_dist  pass\n";
    for (const auto& n : r.normality) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-14s %-6lld %-4s %8.3f  %8.3f  %8.4f  %s\n", fmtz(n.z).c_str(),
                    static_cast<long long>(n.N), n.component.c_str(), n.stats.skewness_z,
                    n.stats.excess_kurtosis_z, n.stats.cdf_distance, n.pass ? "yes" : "no");
      os << line;
    }
  }
  if (!r.covariance_table.empty()) {
    os << "\ncovariance E[X_z X_z'] (empirical vs kernel)\n";
    os << "  z              z'             N      M      empirical               kernel                  rel_err\n";
    for (const auto& c : r.covariance_table) {
      char line[220];
      std::snprintf(line, sizeof line, "  %-14s %-14s %-6lld %-6lld %-23s %-23s %.3f\n", fmtz(c.z).c_str(),
                    fmtz(c.zprime).c_str(), static_cast<long long>(c.N), static_cast<long long>(c.replicates),
                    fmtz(c.empirical).c_str(), fmtz(c.kernel).c_str(), c.rel_err);
      os << line;
    }
  }
  if (!r.flags.empty()) {
    os << "\nflags\n";
    for (const auto& f : r.flags) os << "  [" << (f.pass ? "PASS" : "FAIL") << "] " << f.name << ": " << f.detail << "\n";
  }
  return os.str();
}

}  // namespace halfheavy
