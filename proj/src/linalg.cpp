#include "dcl/linalg.hpp"

#include <algorithm>
#include <limits>

#include "dcl/error.hpp"

namespace dcl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::IllConditionedInterpolation: return "IllConditionedInterpolation";
    case ErrorCode::NotUndirected: return "NotUndirected";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NotMarginal: return "NotMarginal";
    case ErrorCode::MultiplicityAboveOne: return "MultiplicityAboveOne";
    case ErrorCode::ZeroOffdiagonal: return "ZeroOffdiagonal";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::StepMismatch: return "StepMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::FitDidNotConverge: return "FitDidNotConverge";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
  }
  return "Unknown";
}

ComplexVector eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "real Schur decomposition did not converge");
  }
  return solver.eigenvalues();
}

Vector symmetric_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double max_real_part(const ComplexVector& spectrum) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : spectrum) best = std::max(best, v.real());
  return best;
}

int rank_deficiency(const ComplexMatrix& m, double threshold) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  int count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] < threshold) ++count;
  }
  return count;
}

ComplexMatrix null_space(const ComplexMatrix& m, double threshold) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Singular values are sorted in decreasing order.
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] >= threshold) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

std::vector<Complex> sorted_spectrum(std::vector<Complex> values) {
  std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return values;
}

}  // namespace dcl
