#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "halfheavy/ensemble.hpp"
#include "halfheavy/spectral.hpp"
#include "halfheavy/types.hpp"

namespace halfheavy {

struct RunPlan {
  double alpha = 3.0;
  double epsilon = 0.01;
  SymmetryClass symmetry_class = SymmetryClass::real;
  EntryMode mode = EntryMode::raw;
  std::vector<std::int64_t> N_list;
  std::int64_t replicates_per_N = 400;
  std::vector<cplx> z_grid;
  std::uint64_t master_seed = 1;
  int threads = 1;
};

/// Default z-grid: 2i, 1+i, 0.5+0.8i, 3i and their conjugates.
std::vector<cplx> default_z_grid();

void validate(const RunPlan& plan);

/// Ensemble configuration of one N; its seed is derived from (master_seed, N).
EnsembleConfig ensemble_config(const RunPlan& plan, std::int64_t N);

/// Per N: replicate -> traces over the plan's z-grid.
using TraceTable = std::map<std::int64_t, std::vector<std::vector<cplx>>>;

using TraceSink = std::function<void(const SpectralTrace&)>;

/// Samples every (N, replicate) on `plan.threads` workers. The sink sees
/// traces in (N, replicate) order regardless of scheduling.
TraceTable run_ensemble(const RunPlan& plan, const TraceSink& sink = {});

/// Column j of a trace table block: Tr G(z_j) for every replicate.
std::vector<cplx> traces_at(const std::vector<std::vector<cplx>>& by_replicate, std::size_t z_index);

/// CSV sink for traces. Writes to `<path>.partial` and renames on finish(),
/// so an aborted run leaves the .partial marker file behind.
class TraceCsvWriter {
 public:
  TraceCsvWriter(std::filesystem::path path, const std::string& header_comment);
  ~TraceCsvWriter();
  TraceCsvWriter(const TraceCsvWriter&) = delete;
  TraceCsvWriter& operator=(const TraceCsvWriter&) = delete;

  void write(const SpectralTrace& trace, double alpha, EntryMode mode);
  void finish();

 private:
  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::ofstream out_;
  bool finished_ = false;
};

struct ScalingFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::map<std::int64_t, double> variances;  // per N, Var[Re Tr G]
};

/// Var[Re T] by median-of-means over `blocks` blocks of squared deviations
/// from the ensemble mean, with the M/(M-1) centring correction.
double robust_variance(std::span<const cplx> traces, std::size_t blocks = 20);

/// Least squares slope of log variance against log N.
ScalingFit fit_log_variance(const std::map<std::int64_t, double>& variances);

/// Traces at one z, grouped by N. Needs >= 3 distinct N.
ScalingFit variance_scaling_fit(const std::map<std::int64_t, std::vector<cplx>>& traces_by_N, std::size_t blocks = 20);

/// N^{alpha/2 - 2} * (1/(M-1)) sum (T_m(z) - mean)(T_m(z') - mean'), no conjugation.
cplx empirical_covariance(std::span<const cplx> tz, std::span<const cplx> tzp, std::int64_t N, double alpha,
                          std::size_t min_replicates = 500);

struct GaussianityStats {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double skewness_z = 0.0;
  double excess_kurtosis_z = 0.0;
  double cdf_distance = 0.0;
  std::size_t samples = 0;
};

/// Sample is standardised internally before the CDF comparison.
GaussianityStats gaussianity_stats(std::span<const double> samples, std::size_t min_samples = 500);

// ---------------------------------------------------------------------------
// Report

struct Tolerances {
  double slope_abs = 0.15;
  double covariance_rel = 0.30;
  double skewness_z = 5.0;
  double cdf_distance = 0.06;
};

struct ScalingRow {
  cplx z;
  double slope = 0.0;
  double stderr_ = 0.0;
  double target = 0.0;
  std::map<std::int64_t, double> variances;
  std::int64_t replicates = 0;
  bool pass = false;
};

struct NormalityRow {
  cplx z;
  std::int64_t N = 0;
  std::string component;  // "re" or "im"
  GaussianityStats stats;
  bool pass = false;
};

struct CovarianceRow {
  cplx z;
  cplx zprime;
  std::int64_t N = 0;
  std::int64_t replicates = 0;
  cplx empirical;
  cplx kernel;
  double kernel_est_abs_err = 0.0;
  double rel_err = 0.0;
};

struct Flag {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  double alpha = 0.0;
  std::string mode;
  std::string symmetry_class;
  Tolerances tolerances;
  std::vector<ScalingRow> scaling_fits;
  std::vector<NormalityRow> normality;
  std::vector<CovarianceRow> covariance_table;
  std::vector<Flag> flags;

  bool all_pass() const;
};

ScalingRow scaling_row(const TraceTable& table, const RunPlan& plan, std::size_t z_index, const Tolerances& tol);

/// Normalised fluctuations N^{alpha/4 - 1}(T - mean) split into Re and Im.
std::vector<NormalityRow> normality_rows(std::span<const cplx> traces, cplx z, std::int64_t N, double alpha,
                                         const Tolerances& tol);

/// Plain-text summary table of a report.
std::string summary_table(const ExperimentReport& report);

}  // namespace halfheavy
