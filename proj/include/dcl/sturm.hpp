#pragma once

#include <span>

namespace dcl {

/// Number of negative eigenvalues of the symmetric tridiagonal matrix with the
/// given diagonal and (nonzero) off-diagonal, from the sign changes in the
/// sequence 1, det(T1), ..., det(Tn) of leading principal minors.
///
/// A sign change is a transition from + or 0 to -, or from - or 0 to +; a
/// transition from a nonzero value to 0 is not counted.
///
/// Throws ZeroOffdiagonal if any off-diagonal entry is zero, DimensionMismatch
/// if offdiag.size() + 1 != diag.size().
int sturm_negative_count(std::span<const double> diag, std::span<const double> offdiag);

}  // namespace dcl
