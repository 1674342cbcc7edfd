#include "dcl/sturm.hpp"

#include <cmath>
#include <string>

#include "dcl/error.hpp"

namespace dcl {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

int sturm_negative_count(std::span<const double> diag, std::span<const double> offdiag) {
  if (diag.empty()) throw Error(ErrorCode::DimensionMismatch, "empty diagonal");
  if (offdiag.size() + 1 != diag.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "off-diagonal must have " + std::to_string(diag.size() - 1) + " entries");
  }
  for (std::size_t j = 0; j < offdiag.size(); ++j) {
    if (offdiag[j] == 0.0) {
      throw Error(ErrorCode::ZeroOffdiagonal, "b_" + std::to_string(j + 1) + " = 0");
    }
  }

  // det(T_r) = a_r det(T_{r-1}) - b_{r-1}^2 det(T_{r-2}). Rescaling both stored
  // minors by the same positive factor leaves every later sign unchanged.
  constexpr double kRescale = 1e100;
  double prev = 1.0;      // det(T_{r-2}), starting with the leading 1
  double cur = diag[0];   // det(T_{r-1})
  int changes = 0;
  int last_sign = 1;
  auto record = [&](double value) {
    const int sg = sign(value);
    if ((sg < 0 && last_sign >= 0) || (sg > 0 && last_sign <= 0)) ++changes;
    last_sign = sg;
  };
  record(cur);
  for (std::size_t r = 1; r < diag.size(); ++r) {
    const double next = diag[r] * cur - offdiag[r - 1] * offdiag[r - 1] * prev;
    prev = cur;
    cur = next;
    const double big = std::max(std::abs(prev), std::abs(cur));
    if (big > kRescale) {
      prev /= kRescale;
      cur /= kRescale;
    } else if (big < 1.0 / kRescale && big > 0.0) {
      prev *= kRescale;
      cur *= kRescale;
    }
    record(cur);
  }
  return changes;
}

}  // namespace dcl
