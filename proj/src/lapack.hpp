#pragma once

#include <Eigen/Dense>

#include <vector>

namespace halfheavy::detail {

// Dense symmetric / Hermitian eigensolves through LAPACK. Inputs are taken
// by value because LAPACK overwrites the matrix.
std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd a);
std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a);

// Eigenvalues ascending; vectors overwrite `a` column-wise.
std::vector<double> hermitian_eigensystem(Eigen::MatrixXcd& a);

}  // namespace halfheavy::detail
