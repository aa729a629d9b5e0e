#include "lapack.hpp"

#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "halfheavy/types.hpp"

namespace halfheavy::detail {

namespace {

void check(lapack_int info, const char* routine) {
  if (info != 0) throw InputError(std::string(routine) + " failed with info=" + std::to_string(info));
}

}  // namespace

std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  check(LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data()), "dsyev");
  return w;
}

std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  check(LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data()),
        "zheev");
  return w;
}

std::vector<double> hermitian_eigensystem(Eigen::MatrixXcd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data()),
        "zheevd");
  return w;
}

}  // namespace halfheavy::detail
