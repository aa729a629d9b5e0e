#include "halfheavy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "halfheavy/semicircle.hpp"
#include "lapack.hpp"

namespace halfheavy {

namespace {

void require_nonreal(cplx z) {
  if (!(z.imag() != 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("resolvent requires Im z != 0");
  }
}

Eigen::PartialPivLU<Eigen::MatrixXcd> factor_shifted(const Eigen::MatrixXcd& a, cplx z) {
  Eigen::MatrixXcd m = -a;
  m.diagonal().array() += z;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m);
}

std::vector<double> eigenvalues_of(const Eigen::MatrixXcd& a, bool real) {
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  if (real) return detail::symmetric_eigenvalues(a.real());
  return detail::hermitian_eigenvalues(a);
}

}  // namespace

std::vector<double> eigenvalues(const MatrixSample& sample) { return sample.eigenvalues(); }

EigenDecomposition eigendecomposition(const MatrixSample& sample) {
  EigenDecomposition out;
  out.vectors = sample.as_complex();
  if (!out.vectors.allFinite()) throw InputError("matrix has non-finite entries");
  out.values = detail::hermitian_eigensystem(out.vectors);
  return out;
}

cplx trace_resolvent(std::span<const double> eigs, cplx z) {
  require_nonreal(z);
  cplx acc{0.0, 0.0};
  for (double l : eigs) acc += 1.0 / (z - l);
  return acc;
}

SpectralTrace spectral_trace(const MatrixSample& sample, std::span<const cplx> z_grid) {
  SpectralTrace out;
  out.z_grid.assign(z_grid.begin(), z_grid.end());
  out.replicate_index = sample.replicate_index();
  out.N = sample.dim();
  const auto& eigs = sample.eigenvalues();
  out.traces.reserve(z_grid.size());
  for (cplx z : z_grid) out.traces.push_back(trace_resolvent(eigs, z));
  return out;
}

Eigen::VectorXcd resolvent_diag(const MatrixSample& sample, cplx z) {
  require_nonreal(z);
  const Eigen::MatrixXcd a = sample.as_complex();
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  const auto lu = factor_shifted(a, z);
  return lu.inverse().diagonal();
}

Eigen::MatrixXcd remove_row_col(const Eigen::MatrixXcd& a, std::int64_t k) {
  const std::int64_t n = a.rows();
  if (k < 0 || k >= n) throw InputError("index out of range");
  Eigen::MatrixXcd m(n - 1, n - 1);
  for (std::int64_t j = 0, jj = 0; j < n; ++j) {
    if (j == k) continue;
    for (std::int64_t i = 0, ii = 0; i < n; ++i) {
      if (i == k) continue;
      m(ii++, jj) = a(i, j);
    }
    ++jj;
  }
  return m;
}

namespace {

Eigen::VectorXcd column_without(const Eigen::MatrixXcd& a, std::int64_t k) {
  const std::int64_t n = a.rows();
  Eigen::VectorXcd v(n - 1);
  for (std::int64_t i = 0, ii = 0; i < n; ++i) {
    if (i != k) v(ii++) = a(i, k);
  }
  return v;
}

}  // namespace

LeaveOneOut leave_one_out(const MatrixSample& sample, cplx z, std::int64_t k) {
  require_nonreal(z);
  const Eigen::MatrixXcd a = sample.as_complex();
  const std::int64_t n = a.rows();
  if (k < 0 || k >= n) throw InputError("leave_one_out: k out of range");
  const Eigen::MatrixXcd minor = remove_row_col(a, k);
  const Eigen::VectorXcd col = column_without(a, k);

  const auto full_eigs = eigenvalues_of(a, sample.is_real());
  const auto minor_eigs = eigenvalues_of(minor, sample.is_real());

  LeaveOneOut out;
  out.lhs = trace_resolvent(full_eigs, z) - trace_resolvent(minor_eigs, z);

  const auto lu = factor_shifted(minor, z);
  const Eigen::VectorXcd g_a = lu.solve(col);
  const Eigen::VectorXcd g2_a = lu.solve(g_a);
  const cplx quad1 = col.dot(g_a);  // a^* G a
  const cplx quad2 = col.dot(g2_a);
  out.denominator = z - a(k, k) - quad1;
  out.rhs = (1.0 + quad2) / out.denominator;

  const double im_z = std::abs(z.imag());
  out.bound_ok = std::abs(out.lhs) <= std::numbers::pi / im_z;
  const double signed_im = out.denominator.imag() * sgn_im(z);
  out.sign_ok = signed_im > 0.0 && signed_im >= im_z * (1.0 - 1e-12);
  return out;
}

QuadraticFormStats quadratic_form_stats(const Eigen::MatrixXcd& G, const DistSpec& dist, double epsilon,
                                        std::int64_t n_draws, std::mt19937_64& rng) {
  const std::int64_t n = G.rows();
  if (G.cols() != n || n < 2) throw InputError("quadratic_form_stats requires a square matrix, N >= 2");
  if (n_draws < 2) throw InputError("quadratic_form_stats requires at least 2 draws");
  const auto tp = truncation_params(dist, n, epsilon);
  const double cutoff = tp.cutoff();
  const double scale = 1.0 / (tp.sigmaN * std::sqrt(static_cast<double>(n)));
  const Eigen::VectorXcd g_diag = G.diagonal();
  const cplx trace_over_n = G.trace() / static_cast<double>(n);

  Eigen::VectorXd a(n);
  double sum_x = 0.0, sum_x2 = 0.0, sum_e = 0.0, sum_e2 = 0.0;
  for (std::int64_t d = 0; d < n_draws; ++d) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double x = sample(dist, rng);
      a(i) = ((std::abs(x) <= cutoff ? x : 0.0) - tp.muN) * scale;
    }
    const Eigen::VectorXd a2 = a.array().square();
    const cplx diag_part = (g_diag.array() * a2.array().cast<cplx>()).sum();
    const cplx full = a.cast<cplx>().dot(G * a.cast<cplx>());
    const double x_abs2 = std::norm(full - diag_part);
    const double e_abs2 = std::norm(diag_part - trace_over_n);
    sum_x += x_abs2;
    sum_x2 += x_abs2 * x_abs2;
    sum_e += e_abs2;
    sum_e2 += e_abs2 * e_abs2;
  }
  const double m = static_cast<double>(n_draws);
  QuadraticFormStats out;
  out.draws = n_draws;
  out.EX2_hat = sum_x / m;
  out.EE2_hat = sum_e / m;
  out.X_stderr = std::sqrt(std::max(0.0, (sum_x2 / m - out.EX2_hat * out.EX2_hat) / (m - 1.0)));
  out.E_stderr = std::sqrt(std::max(0.0, (sum_e2 / m - out.EE2_hat * out.EE2_hat) / (m - 1.0)));

  const double nd = static_cast<double>(n);
  out.boundX = 2.0 * G.squaredNorm() / (nd * nd);
  const double op_norm = Eigen::JacobiSVD<Eigen::MatrixXcd>(G).singularValues()(0);
  out.moment_constant = fourth_moment_constant(dist, tp);
  const double alpha = dist.alpha;
  out.boundE = 10.0 * out.moment_constant * op_norm * op_norm *
               std::pow(nd, -alpha * alpha / 16.0 + epsilon * (4.0 - alpha));
  return out;
}

DiagConcentration::DiagConcentration(cplx z) : z_(z), gsc_(g_sc(z)) {}

void DiagConcentration::add(const MatrixSample& sample) { add_diagonal(sample.dim(), resolvent_diag(sample, z_)); }

void DiagConcentration::add_diagonal(std::int64_t N, const Eigen::VectorXcd& diag) {
  const double dev = (diag.array() - gsc_).abs().maxCoeff();
  auto& slot = acc_[N];
  slot.first += dev;
  slot.second += 1;
}

std::map<std::int64_t, double> DiagConcentration::mean_max_dev() const {
  std::map<std::int64_t, double> out;
  for (const auto& [n, s] : acc_) out[n] = s.first / static_cast<double>(s.second);
  return out;
}

std::map<std::int64_t, std::int64_t> DiagConcentration::counts() const {
  std::map<std::int64_t, std::int64_t> out;
  for (const auto& [n, s] : acc_) out[n] = s.second;
  return out;
}

std::map<std::int64_t, double> diag_concentration(std::span<const MatrixSample> samples, cplx z) {
  DiagConcentration acc(z);
  for (const auto& s : samples) acc.add(s);
  return acc.mean_max_dev();
}

FkStatistic fk_statistic(const Eigen::MatrixXcd& minor, const Eigen::VectorXcd& column, cplx a_kk, cplx z) {
  require_nonreal(z);
  const auto lu = factor_shifted(minor, z);
  const Eigen::MatrixXcd g = lu.inverse();
  const Eigen::VectorXcd g_a = g * column;
  const Eigen::VectorXcd g2_a = g * g_a;
  FkStatistic out;
  out.full = (1.0 + column.dot(g2_a)) / (z - a_kk - column.dot(g_a));

  // (G^2)_jj = sum_m G_jm G_mj
  const Eigen::VectorXcd g2_diag = g.cwiseProduct(g.transpose()).rowwise().sum();
  const Eigen::ArrayXd weights = column.array().abs2();
  const cplx num = 1.0 + (weights.cast<cplx>() * g2_diag.array()).sum();
  const cplx den = z - (weights.cast<cplx>() * g.diagonal().array()).sum();
  out.diag_only = num / den;
  return out;
}

FkStatistic fk_statistic(const MatrixSample& sample, cplx z, std::int64_t k) {
  const Eigen::MatrixXcd a = sample.as_complex();
  if (k < 0 || k >= a.rows()) throw InputError("fk_statistic: k out of range");
  return fk_statistic(remove_row_col(a, k), column_without(a, k), a(k, k), z);
}

}  // namespace halfheavy
