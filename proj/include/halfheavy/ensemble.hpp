#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "halfheavy/heavytail.hpp"
#include "halfheavy/types.hpp"

namespace halfheavy {

struct EnsembleConfig {
  std::int64_t N = 2;
  DistSpec dist;
  SymmetryClass symmetry_class = SymmetryClass::real;
  EntryMode mode = EntryMode::raw;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
};

void validate(const EnsembleConfig& cfg);

/// One Hermitian realization A = [x_ij / sqrt(N)]. Real symmetric samples
/// are stored as real matrices; eigenvalues are computed once on demand and
/// cached (thread-safe).
class MatrixSample {
 public:
  using RealMatrix = Eigen::MatrixXd;
  using ComplexMatrix = Eigen::MatrixXcd;

  MatrixSample(EnsembleConfig config, std::int64_t replicate_index, RealMatrix entries);
  MatrixSample(EnsembleConfig config, std::int64_t replicate_index, ComplexMatrix entries);

  std::int64_t dim() const;
  bool is_real() const { return std::holds_alternative<RealMatrix>(entries_); }
  const RealMatrix& real_entries() const { return std::get<RealMatrix>(entries_); }
  const ComplexMatrix& complex_entries() const { return std::get<ComplexMatrix>(entries_); }
  /// Entries promoted to complex (a copy for real samples).
  ComplexMatrix as_complex() const;
  cplx entry(std::int64_t i, std::int64_t j) const;

  const EnsembleConfig& config() const { return config_; }
  std::int64_t replicate_index() const { return replicate_index_; }

  /// Ascending eigenvalues, computed on first use.
  const std::vector<double>& eigenvalues() const;

 private:
  struct Cache {
    std::once_flag once;
    std::vector<double> eigenvalues;
  };

  EnsembleConfig config_;
  std::int64_t replicate_index_ = 0;
  std::variant<RealMatrix, ComplexMatrix> entries_;
  std::shared_ptr<Cache> cache_;
};

/// Raw (untruncated) draw of variable `component` of entry (i, j), i <= j.
/// Component 0 is the real part, 1 the imaginary part (complex class).
double raw_variable(const EnsembleConfig& cfg, std::int64_t replicate_index, std::int64_t i, std::int64_t j,
                    int component);

MatrixSample build_matrix(const EnsembleConfig& cfg, std::int64_t replicate_index);

struct ExceedanceStats {
  std::int64_t observed_count = 0;
  double expected_count = 0.0;
  std::int64_t variables = 0;  // raw variables inspected
};

/// Counts raw variables of the upper triangle (with diagonal) exceeding N^beta.
ExceedanceStats exceedance_stats(const EnsembleConfig& cfg, std::int64_t replicate_index = 0);

/// Binary dump: one JSON header line, then row-major IEEE-754 doubles
/// (re/im interleaved for the complex class).
void write_sample(std::ostream& out, const MatrixSample& sample);
MatrixSample read_sample(std::istream& in);

}  // namespace halfheavy
