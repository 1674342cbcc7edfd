#pragma once

#include <functional>
#include <vector>

#include "dcl/linalg.hpp"

namespace dcl {

/// Coefficients in increasing degree: c[0] + c[1] s + ... + c[d] s^d.
using Polynomial = std::vector<double>;

double evaluate(const Polynomial& p, double s);
Complex evaluate(const Polynomial& p, Complex s);

/// Interpolates `f` at `degree + 1` Chebyshev points of the first kind on
/// [-half_width, half_width] and returns monomial coefficients.
Polynomial chebyshev_interpolate(const std::function<double(double)>& f, int degree,
                                 double half_width);

/// Drops trailing coefficients with |c| < rel_tol * max|c|.
Polynomial trim(Polynomial p, double rel_tol);

/// All complex roots via the companion matrix.
std::vector<Complex> roots(const Polynomial& p);

/// A real root with its multiplicity (size of the numerical root cluster).
struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;
};

/// Real roots, ascending. Roots closer than `cluster_tol` are merged by
/// averaging, which is well conditioned for perturbed multiple roots; a cluster
/// counts as real when its centroid's imaginary part is below `imag_tol`.
std::vector<RealRoot> real_roots(const Polynomial& p, double cluster_tol = 1e-3,
                                 double imag_tol = 1e-7);

}  // namespace dcl
