#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcl/graph.hpp"
#include "dcl/linalg.hpp"
#include "dcl/polynomial.hpp"
#include "dcl/spectra.hpp"

namespace dcl {

// Numerical thresholds shared by the stability analysis.
namespace tol {
inline constexpr double kInfiniteEigenvalue = 1e8;   ///< |lambda| above this is infinite
inline constexpr double kInfiniteBeta = 1e-12;       ///< pencil beta below this is infinite
inline constexpr double kMarginal = 1e-7;            ///< |Re| <= kMarginal * max(1, rho)
inline constexpr double kGrouping = 1e-6;            ///< eigenvector component clustering
inline constexpr double kAlgebraicCluster = 1e-7;    ///< eigenvalue root clustering
inline constexpr double kRank = 1e-9;                ///< relative singular value threshold
inline constexpr double kPolyTrim = 1e-8;            ///< q(s) coefficient trimming
inline constexpr double kRealEigenvalue = 1e-6;      ///< |Im| below this counts as real
inline constexpr double kIntegerSnap = 1e-2;         ///< near-integer q(s) coefficients are rounded
}  // namespace tol

/// Solution of ((I - D) lambda^2 + A lambda - I) z = 0.
struct QepResult {
  std::vector<Complex> finite_eigenvalues;
  std::vector<ComplexVector> right_eigenvectors;  ///< parallel to finite_eigenvalues, unit norm
  int infinite_count = 0;
  int degree_r = 0;  ///< number of finite eigenvalues = degree of det P(lambda)

  /// Finite eigenvalues with |Im| small, ascending and with clusters merged.
  std::vector<double> real_eigenvalues(double imag_tol = tol::kRealEigenvalue) const;
};

/// Linearizes to the 2n x 2n pencil [[0, I], [I, -A]] - lambda [[I, 0], [0, I - D]].
QepResult qep_solve(const Graph& g);

/// ||((I - D) lambda^2 + A lambda - I) z|| / ||z||. Throws ZeroVector.
double residual(const Graph& g, Complex lambda, const ComplexVector& z);

/// q(s) = det((I - D) s^2 + A s - I) = det(-Delta(s)), degree trimmed to r.
Polynomial q_poly(const Graph& g);

enum class StabilityClass { AsymptoticallyStable, MarginallyStable, Unstable };
std::string to_string(StabilityClass c);

/// Verdict from the numeric spectrum of -Delta(s).
StabilityClass classify_at(const Graph& g, double s);

/// Max real part of the spectrum of -Delta(s).
double max_real_part_at(const Graph& g, double s);

enum class ModeKind { Clusters, AverageConsensus, Consensus, BipartiteConsensus, Oscillation };
std::string to_string(ModeKind k);

struct OscillationDescriptor {
  double frequency = 0.0;  ///< Hz
  std::vector<double> amplitudes;
  std::vector<double> phases;  ///< radians, sine convention, relative to vertex 1
};

struct MarginalMode {
  double s_star = 0.0;
  ModeKind kind = ModeKind::Clusters;
  int geometric_multiplicity = 1;
  std::optional<Vector> zero_eigvec;  ///< unit norm, first nonzero component positive
  std::optional<Matrix> projector;    ///< z z^T, or u v^T with u^T v = 1 for digraphs
  std::vector<std::vector<int>> groups;  ///< 1-based vertex ids
  std::optional<OscillationDescriptor> oscillation;
};

/// Throws NotMarginal when classify_at(g, s_star) is not marginally stable.
/// For a zero eigenvalue of geometric multiplicity > 1 the mode is returned
/// without a projector; `require_simple` turns that case into MultiplicityAboveOne.
MarginalMode marginal_mode(const Graph& g, double s_star, bool require_simple = false);

enum class StabilityMethod { ClosedForm, QepSignRule, Sweep };
std::string to_string(StabilityMethod m);

struct MarginalPoint {
  double s = 0.0;
  std::string kind;  ///< ModeKind or MarginalTag name
  std::vector<std::vector<int>> groups;
  std::optional<double> frequency;
};

struct StabilityReport {
  std::string graph;
  StabilityMethod method = StabilityMethod::QepSignRule;
  std::vector<Interval> stable;
  std::vector<Interval> unstable;
  std::vector<MarginalPoint> marginal;
  std::optional<Polynomial> q;                ///< sign-rule reports carry q(s)
  std::optional<Interval> range;              ///< sweep reports cover only this range
  std::vector<std::string> warnings;
};

/// Sign rule on q(s) for connected undirected graphs.
/// Throws NotUndirected or Disconnected.
StabilityReport stability_intervals(const Graph& g);

/// Closed-form report for a named family.
StabilityReport stability_report(const FamilyStability& fs);

/// Numeric scan of [lo, hi] for graphs where the sign rule does not apply.
StabilityReport sweep_report(const Graph& g, double lo = -5.0, double hi = 5.0,
                             double coarse_step = 1e-2);

/// Parameter value in the bracket where max Re(spectrum of -Delta(s)) crosses
/// zero, refined to |ds| < 1e-6. Throws NoBracket.
double sweep_threshold(const Graph& g, double s_lo, double s_hi, double coarse_step);

}  // namespace dcl
