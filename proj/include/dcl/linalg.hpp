#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dcl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Eigenvalues of a general real matrix.
ComplexVector eigenvalues(const Matrix& m);

/// Ascending eigenvalues of a symmetric matrix.
Vector symmetric_eigenvalues(const Matrix& m);

/// Largest real part over the spectrum.
double max_real_part(const ComplexVector& spectrum);

/// Number of singular values below `threshold`.
int rank_deficiency(const ComplexMatrix& m, double threshold);

/// Orthonormal basis of the numerical null space (singular values below `threshold`).
ComplexMatrix null_space(const ComplexMatrix& m, double threshold);

/// Sort complex values by real part, then imaginary part.
std::vector<Complex> sorted_spectrum(std::vector<Complex> values);

}  // namespace dcl
