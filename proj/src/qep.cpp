#include "dcl/qep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "dcl/error.hpp"

namespace dcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double marginal_tolerance(double spectral_radius) {
  return tol::kMarginal * std::max(1.0, spectral_radius);
}

double spectral_radius(const ComplexVector& ev) {
  double rho = 0.0;
  for (const auto& v : ev) rho = std::max(rho, std::abs(v));
  return rho;
}

ComplexVector spectrum_of(const Graph& g, const Matrix& neg_delta) {
  if (!g.directed()) return symmetric_eigenvalues(neg_delta).cast<Complex>();
  return eigenvalues(neg_delta);
}

double det_neg_delta(const MatrixBundle& m, double s) {
  return (-deformed_laplacian(m, s)).partialPivLu().determinant();
}

// Groups 1-based vertex ids whose (max-normalized) components agree.
std::vector<std::vector<int>> group_components(const Vector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  std::vector<int> order(v.size());
  for (int i = 0; i < v.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<std::vector<int>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || (v[order[k]] - v[order[k - 1]]) / peak >= tol::kGrouping) groups.emplace_back();
    groups.back().push_back(order[k] + 1);
  }
  for (auto& grp : groups) std::sort(grp.begin(), grp.end());
  std::sort(groups.begin(), groups.end());
  return groups;
}

// Real unit vector spanning a one-dimensional complex null space.
Vector real_direction(const ComplexVector& z) {
  Eigen::Index k;
  z.cwiseAbs().maxCoeff(&k);
  const Complex phase = z[k] / std::abs(z[k]);
  Vector r = (z / phase).real();
  r.normalize();
  return r;
}

// Sign convention: largest-magnitude component positive.
void fix_sign(Vector& v) {
  Eigen::Index k;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0) v = -v;
}

}  // namespace

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::AsymptoticallyStable: return "asymptotically-stable";
    case StabilityClass::MarginallyStable: return "marginally-stable";
    case StabilityClass::Unstable: return "unstable";
  }
  return "unknown";
}

std::string to_string(ModeKind k) {
  switch (k) {
    case ModeKind::Clusters: return "clusters";
    case ModeKind::AverageConsensus: return "average-consensus";
    case ModeKind::Consensus: return "consensus";
    case ModeKind::BipartiteConsensus: return "bipartite-consensus";
    case ModeKind::Oscillation: return "oscillation";
  }
  return "unknown";
}

std::string to_string(StabilityMethod m) {
  switch (m) {
    case StabilityMethod::ClosedForm: return "closed-form";
    case StabilityMethod::QepSignRule: return "qep-sign-rule";
    case StabilityMethod::Sweep: return "sweep";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// QEP

std::vector<double> QepResult::real_eigenvalues(double imag_tol) const {
  std::vector<double> reals;
  for (const auto& v : finite_eigenvalues) {
    if (std::abs(v.imag()) < imag_tol * std::max(1.0, std::abs(v))) reals.push_back(v.real());
  }
  std::sort(reals.begin(), reals.end());
  std::vector<double> merged;
  for (std::size_t i = 0; i < reals.size();) {
    std::size_t j = i + 1;
    double sum = reals[i];
    while (j < reals.size() && reals[j] - reals[j - 1] < imag_tol * std::max(1.0, std::abs(reals[j]))) {
      sum += reals[j++];
    }
    merged.push_back(sum / double(j - i));
    i = j;
  }
  return merged;
}

namespace {

// Fallback when QZ stalls. With mu = 1 / lambda the reversed polynomial -mu^2 + A mu + (I - D) is
// monic up to sign, so a companion matrix suffices. The infinite eigenvalues (mu = 0) are defective
// and only resolved to about sqrt(eps), so their count is taken from deg q instead of a threshold.
QepResult reversed_companion_solve(const MatrixBundle& m, int n, int infinite) {
  const Matrix identity = Matrix::Identity(n, n);
  Matrix companion = Matrix::Zero(2 * n, 2 * n);
  companion.topRightCorner(n, n) = identity;
  companion.bottomLeftCorner(n, n) = identity - m.degree;
  companion.bottomRightCorner(n, n) = m.adjacency;
  Eigen::EigenSolver<Matrix> es(companion, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "neither QZ nor the companion eigensolver converged");
  }
  const ComplexVector mus = es.eigenvalues();
  const ComplexMatrix vectors = es.eigenvectors();
  std::vector<Eigen::Index> order(mus.size());
  for (Eigen::Index k = 0; k < mus.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(mus[a]) < std::abs(mus[b]); });

  QepResult out;
  out.infinite_count = infinite;
  for (std::size_t r = static_cast<std::size_t>(infinite); r < order.size(); ++r) {
    const Eigen::Index k = order[r];
    out.finite_eigenvalues.push_back(1.0 / mus[k]);
    ComplexVector z = vectors.col(k).head(n);
    const double norm = z.norm();
    if (norm > 0) z /= norm;
    out.right_eigenvectors.push_back(std::move(z));
  }
  out.degree_r = static_cast<int>(out.finite_eigenvalues.size());
  return out;
}

}  // namespace

QepResult qep_solve(const Graph& g) {
  const int n = g.order();
  const MatrixBundle m = matrices(g);
  const Matrix identity = Matrix::Identity(n, n);
  Matrix lhs = Matrix::Zero(2 * n, 2 * n);
  Matrix rhs = Matrix::Zero(2 * n, 2 * n);
  lhs.topRightCorner(n, n) = identity;
  lhs.bottomLeftCorner(n, n) = identity;
  lhs.bottomRightCorner(n, n) = -m.adjacency;
  rhs.topLeftCorner(n, n) = identity;
  rhs.bottomRightCorner(n, n) = identity - m.degree;

  Eigen::GeneralizedEigenSolver<Matrix> solver(lhs, rhs, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    return reversed_companion_solve(m, n, 2 * n - (static_cast<int>(q_poly(g).size()) - 1));
  }
  const ComplexVector alphas = solver.alphas();
  const Vector betas = solver.betas();
  const ComplexMatrix vectors = solver.eigenvectors();
  const double beta_floor = tol::kInfiniteBeta * std::max(1.0, rhs.cwiseAbs().maxCoeff());

  QepResult out;
  for (Eigen::Index k = 0; k < alphas.size(); ++k) {
    const bool infinite = std::abs(betas[k]) < beta_floor ||
                          std::abs(alphas[k]) > tol::kInfiniteEigenvalue * std::abs(betas[k]);
    if (infinite) {
      ++out.infinite_count;
      continue;
    }
    out.finite_eigenvalues.push_back(alphas[k] / betas[k]);
    ComplexVector z = vectors.col(k).head(n);
    const double norm = z.norm();
    if (norm > 0) z /= norm;
    out.right_eigenvectors.push_back(std::move(z));
  }
  out.degree_r = static_cast<int>(out.finite_eigenvalues.size());
  return out;
}

double residual(const Graph& g, Complex lambda, const ComplexVector& z) {
  const double norm = z.norm();
  if (norm == 0.0) throw Error(ErrorCode::ZeroVector, "residual of the zero vector");
  if (z.size() != g.order()) throw Error(ErrorCode::DimensionMismatch, "z has wrong dimension");
  const MatrixBundle m = matrices(g);
  const Matrix identity = Matrix::Identity(g.order(), g.order());
  const ComplexMatrix p = (identity - m.degree).cast<Complex>() * (lambda * lambda) +
                          m.adjacency.cast<Complex>() * lambda - identity.cast<Complex>();
  return (p * z).norm() / norm;
}

Polynomial q_poly(const Graph& g) {
  const MatrixBundle m = matrices(g);
  const int n = g.order();
  const int count = 2 * n + 1;
  constexpr double kHalfWidth = 2.0;
  auto q = [&](double s) { return det_neg_delta(m, s); };

  // Samples on the unit circle; the inverse DFT is unitary, so coefficient error stays near
  // eps * max |q| there instead of growing with the degree.
  const Matrix identity = Matrix::Identity(n, n);
  const ComplexMatrix quad = (identity - m.degree).cast<Complex>();
  const ComplexMatrix lin = m.adjacency.cast<Complex>();
  std::vector<Complex> samples(count);
  for (int j = 0; j < count; ++j) {
    const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * j / count);
    const ComplexMatrix neg = quad * (z * z) + lin * z - identity.cast<Complex>();
    samples[j] = neg.partialPivLu().determinant();
  }
  Polynomial coeffs(count, 0.0);
  for (int k = 0; k < count; ++k) {
    Complex acc = 0.0;
    for (int j = 0; j < count; ++j) acc += samples[j] * std::polar(1.0, -2.0 * std::numbers::pi * k * j / count);
    coeffs[k] = acc.real() / count;
  }
  // Unweighted graphs give integer coefficients; snapping removes the remaining rounding noise.
  const bool near_integer = std::all_of(coeffs.begin(), coeffs.end(), [](double c) {
    return std::abs(c - std::round(c)) < tol::kIntegerSnap;
  });
  if (near_integer) {
    for (double& c : coeffs) c = std::round(c) + 0.0;
  }

  // Check the interpolant away from the nodes.
  double scale = 0.0, worst = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const double s = -kHalfWidth + kHalfWidth * k / 8.0 + 1e-3 * std::sin(k + 1.0);
    const double exact = q(s);
    scale = std::max(scale, std::abs(exact));
    worst = std::max(worst, std::abs(exact - evaluate(coeffs, s)));
  }
  if (!std::isfinite(scale) || !std::isfinite(worst) || worst > 1e-6 * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::IllConditionedInterpolation,
                "interpolated q(s) misses det(-Delta(s)) by " + std::to_string(worst));
  }
  return trim(std::move(coeffs), tol::kPolyTrim);
}

// ---------------------------------------------------------------------------
// Classification

double max_real_part_at(const Graph& g, double s) {
  return max_real_part(spectrum_of(g, -deformed_laplacian(g, s)));
}

namespace {

struct CriticalCluster {
  Complex center;
  int algebraic = 0;
  int geometric = 0;
};

struct SpectralVerdict {
  StabilityClass cls = StabilityClass::AsymptoticallyStable;
  double tolerance = 0.0;
  double matrix_norm = 0.0;
  std::vector<CriticalCluster> critical;  // eigenvalue clusters on the imaginary axis
};

SpectralVerdict analyze_spectrum(const Graph& g, const Matrix& neg_delta) {
  const ComplexVector ev = spectrum_of(g, neg_delta);
  SpectralVerdict v;
  v.tolerance = marginal_tolerance(spectral_radius(ev));
  v.matrix_norm = neg_delta.norm();
  const double top = max_real_part(ev);
  if (top < -v.tolerance) return v;
  if (top > v.tolerance) {
    v.cls = StabilityClass::Unstable;
    return v;
  }

  std::vector<Complex> axis;
  for (const auto& e : ev) {
    if (std::abs(e.real()) <= v.tolerance) axis.push_back(e);
  }
  const double cluster_tol = tol::kAlgebraicCluster * std::max(1.0, spectral_radius(ev));
  std::vector<bool> used(axis.size(), false);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (used[i]) continue;
    CriticalCluster c;
    Complex sum = 0.0;
    for (std::size_t j = i; j < axis.size(); ++j) {
      if (!used[j] && std::abs(axis[j] - axis[i]) < std::max(cluster_tol, v.tolerance)) {
        used[j] = true;
        sum += axis[j];
        ++c.algebraic;
      }
    }
    c.center = sum / double(c.algebraic);
    if (std::abs(c.center.imag()) <= v.tolerance) c.center = Complex(0.0, 0.0);
    v.critical.push_back(c);
  }

  const int n = static_cast<int>(neg_delta.rows());
  const double rank_tol = std::max(tol::kRank * v.matrix_norm, 2.0 * v.tolerance);
  bool semisimple = true;
  for (auto& c : v.critical) {
    const ComplexMatrix shifted =
        neg_delta.cast<Complex>() - c.center * ComplexMatrix::Identity(n, n);
    c.geometric = rank_deficiency(shifted, rank_tol);
    if (c.geometric < c.algebraic) semisimple = false;
  }
  v.cls = semisimple ? StabilityClass::MarginallyStable : StabilityClass::Unstable;
  return v;
}

}  // namespace

StabilityClass classify_at(const Graph& g, double s) {
  return analyze_spectrum(g, -deformed_laplacian(g, s)).cls;
}

MarginalMode marginal_mode(const Graph& g, double s_star, bool require_simple) {
  const int n = g.order();
  const Matrix neg = -deformed_laplacian(g, s_star);
  const SpectralVerdict verdict = analyze_spectrum(g, neg);
  if (verdict.cls != StabilityClass::MarginallyStable) {
    throw Error(ErrorCode::NotMarginal,
                "s = " + std::to_string(s_star) + " is " + to_string(verdict.cls));
  }
  const double rank_tol = std::max(tol::kRank * verdict.matrix_norm, 2.0 * verdict.tolerance);

  MarginalMode mode;
  mode.s_star = s_star;

  const CriticalCluster* zero = nullptr;
  const CriticalCluster* oscillating = nullptr;
  for (const auto& c : verdict.critical) {
    if (c.center == Complex(0.0, 0.0)) {
      zero = &c;
    } else if (c.center.imag() > 0 && oscillating == nullptr) {
      oscillating = &c;
    }
  }

  if (oscillating != nullptr) {
    const ComplexMatrix shifted =
        neg.cast<Complex>() - oscillating->center * ComplexMatrix::Identity(n, n);
    const ComplexVector u = null_space(shifted, rank_tol).col(0);
    OscillationDescriptor osc;
    osc.frequency = oscillating->center.imag() / (2.0 * std::numbers::pi);
    const double peak = u.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      osc.amplitudes.push_back(std::abs(u[i]) / peak);
      double phase = std::arg(u[i]) - std::arg(u[0]);
      phase = std::remainder(phase, 2.0 * std::numbers::pi);
      if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
      osc.phases.push_back(phase);
    }
    mode.oscillation = std::move(osc);
    mode.kind = ModeKind::Oscillation;
  }

  if (zero == nullptr) return mode;

  mode.geometric_multiplicity = zero->geometric;
  const ComplexMatrix kernel = null_space(neg.cast<Complex>(), rank_tol);
  if (kernel.cols() != 1) {
    mode.geometric_multiplicity = static_cast<int>(kernel.cols());
    if (require_simple) {
      throw Error(ErrorCode::MultiplicityAboveOne,
                  "zero eigenvalue has geometric multiplicity " +
                      std::to_string(kernel.cols()));
    }
    return mode;
  }

  Vector right = real_direction(kernel.col(0));
  fix_sign(right);
  mode.zero_eigvec = right;
  bool uniform_left = true;
  if (g.directed()) {
    const ComplexMatrix left_kernel = null_space(neg.transpose().cast<Complex>(), rank_tol);
    Vector left = real_direction(left_kernel.col(0));
    const double pairing = right.dot(left);
    if (std::abs(pairing) < 1e-12) {
      throw Error(ErrorCode::MultiplicityAboveOne, "left and right null vectors are orthogonal");
    }
    left /= pairing;
    mode.projector = right * left.transpose();
    uniform_left = (left.array() - left.mean()).abs().maxCoeff() <
                   tol::kGrouping * left.cwiseAbs().maxCoeff();
  } else {
    mode.projector = right * right.transpose();
  }

  mode.groups = group_components(right);
  if (mode.kind != ModeKind::Oscillation) {
    if (mode.groups.size() == 1) {
      mode.kind = uniform_left ? ModeKind::AverageConsensus : ModeKind::Consensus;
    } else if (mode.groups.size() == 2) {
      const double a = right[mode.groups[0].front() - 1];
      const double b = right[mode.groups[1].front() - 1];
      const double peak = right.cwiseAbs().maxCoeff();
      mode.kind = std::abs(a + b) < tol::kGrouping * peak ? ModeKind::BipartiteConsensus
                                                          : ModeKind::Clusters;
    } else {
      mode.kind = ModeKind::Clusters;
    }
  }
  return mode;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

MarginalPoint marginal_point(const Graph& g, double s) {
  const MarginalMode mode = marginal_mode(g, s);
  MarginalPoint p{s, to_string(mode.kind), mode.groups, std::nullopt};
  if (mode.oscillation) p.frequency = mode.oscillation->frequency;
  return p;
}

// Classifies the open intervals between sorted breakpoints and resolves each
// breakpoint. Breakpoints that are not marginal are dropped and the
// intervals around them merged when they agree.
void assemble(const Graph& g, std::vector<double> breaks, double lo, double hi,
              const std::function<StabilityClass(double, double, double)>& classify_interval,
              StabilityReport& report) {
  std::vector<double> kept;
  std::vector<StabilityClass> classes;
  auto test_point = [&](double a, double b) {
    if (std::isinf(a) && std::isinf(b)) return 0.0;
    if (std::isinf(a)) return b - std::max(1.0, std::abs(b));
    if (std::isinf(b)) return a + std::max(1.0, std::abs(a));
    return 0.5 * (a + b);
  };

  std::vector<double> ends;
  ends.push_back(lo);
  for (double b : breaks) ends.push_back(b);
  ends.push_back(hi);
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
    classes.push_back(classify_interval(ends[i], ends[i + 1], test_point(ends[i], ends[i + 1])));
  }

  std::vector<Interval> merged;
  std::vector<StabilityClass> merged_class;
  Interval current{ends[0], ends[1]};
  StabilityClass current_class = classes[0];
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const double b = breaks[k];
    const StabilityClass at = classify_at(g, b);
    if (at == StabilityClass::MarginallyStable) {
      report.marginal.push_back(marginal_point(g, b));
    } else {
      report.warnings.push_back("breakpoint s = " + std::to_string(b) + " is " + to_string(at) +
                                ", not marginal");
    }
    if (at != StabilityClass::MarginallyStable && classes[k + 1] == current_class) {
      current.hi = ends[k + 2];
      continue;
    }
    merged.push_back(current);
    merged_class.push_back(current_class);
    current = {b, ends[k + 2]};
    current_class = classes[k + 1];
  }
  merged.push_back(current);
  merged_class.push_back(current_class);

  for (std::size_t i = 0; i < merged.size(); ++i) {
    switch (merged_class[i]) {
      case StabilityClass::AsymptoticallyStable: report.stable.push_back(merged[i]); break;
      case StabilityClass::Unstable: report.unstable.push_back(merged[i]); break;
      case StabilityClass::MarginallyStable:
        report.warnings.push_back("interval (" + std::to_string(merged[i].lo) + ", " +
                                  std::to_string(merged[i].hi) + ") is marginally stable throughout");
        break;
    }
  }
}

// Polishes a simple root of det(-Delta(s)) by bisection when it brackets a sign change.
double polish_root(const MatrixBundle& m, double r) {
  double h = 1e-6 * std::max(1.0, std::abs(r));
  double lo = r - h, hi = r + h;
  double f_lo = det_neg_delta(m, lo);
  const double f_hi = det_neg_delta(m, hi);
  if ((f_lo < 0) == (f_hi < 0) || f_lo == 0.0 || f_hi == 0.0) return r;
  for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, std::abs(r)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = det_neg_delta(m, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

StabilityReport stability_intervals(const Graph& g) {
  if (g.directed()) {
    throw Error(ErrorCode::NotUndirected, "the q(s) sign rule needs an undirected graph; use a sweep");
  }
  if (!structure_probe(g).connected) {
    throw Error(ErrorCode::Disconnected, "the q(s) sign rule needs a connected graph");
  }
  const MatrixBundle m = matrices(g);
  StabilityReport report;
  report.graph = g.name();
  report.method = StabilityMethod::QepSignRule;
  report.q = q_poly(g);

  std::vector<double> breaks;
  for (const auto& root : real_roots(*report.q, 1e-4)) {
    const double r = root.multiplicity == 1 ? polish_root(m, root.value) : root.value;
    const Matrix delta = deformed_laplacian(m, r);
    const double smallest = symmetric_eigenvalues(delta).cwiseAbs().minCoeff();
    if (smallest > 1e-6 * std::max(1.0, delta.norm())) {
      report.warnings.push_back("discarded spurious root s = " + std::to_string(r));
      continue;
    }
    if (breaks.empty() || r - breaks.back() > 1e-9) breaks.push_back(r);
  }

  const bool even = g.order() % 2 == 0;
  auto classify_interval = [&](double, double, double s) {
    const double q = det_neg_delta(m, s);
    const bool stable = even ? q > 0 : q < 0;
    const StabilityClass by_sign =
        stable ? StabilityClass::AsymptoticallyStable : StabilityClass::Unstable;
    const StabilityClass numeric = classify_at(g, s);
    if (numeric != by_sign) {
      report.warnings.push_back("sign rule disagrees with the spectrum at s = " +
                                std::to_string(s) + "; using the spectrum");
      return numeric;
    }
    return by_sign;
  };
  assemble(g, breaks, -kInf, kInf, classify_interval, report);
  return report;
}

StabilityReport stability_report(const FamilyStability& fs) {
  StabilityReport report;
  report.graph = fs.family.spec();
  report.method = StabilityMethod::ClosedForm;
  report.stable = fs.stable;
  report.unstable = fs.unstable;
  for (const auto& p : fs.marginal) {
    MarginalPoint mp{p.s, to_string(p.tag), {}, std::nullopt};
    if (p.tag == MarginalTag::StableOscillation) {
      mp.frequency = directed_cycle_oscillation(fs.family.order()).frequency;
    }
    report.marginal.push_back(std::move(mp));
  }
  return report;
}

namespace {

// Bisection on the sign of the max real part; returns the crossing point.
double bisect_crossing(const Graph& g, double lo, double hi, double width) {
  const bool lo_unstable = max_real_part_at(g, lo) > 0.0;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if ((max_real_part_at(g, mid) > 0.0) == lo_unstable) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::ceil((hi - lo) / step - 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(std::min(hi, lo + step * k));
  return out;
}

}  // namespace

double sweep_threshold(const Graph& g, double s_lo, double s_hi, double coarse_step) {
  if (!(s_lo < s_hi) || !(coarse_step > 0.0)) {
    throw Error(ErrorCode::NoBracket, "need s_lo < s_hi and a positive step");
  }
  const auto samples = grid(s_lo, s_hi, coarse_step);
  bool prev = max_real_part_at(g, samples.front()) > 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const bool cur = max_real_part_at(g, samples[k]) > 0.0;
    if (cur != prev) return bisect_crossing(g, samples[k - 1], samples[k], 1e-9);
    prev = cur;
  }
  throw Error(ErrorCode::NoBracket, "stability does not change on [" + std::to_string(s_lo) +
                                        ", " + std::to_string(s_hi) + "]");
}

StabilityReport sweep_report(const Graph& g, double lo, double hi, double coarse_step) {
  StabilityReport report;
  report.graph = g.name();
  report.method = StabilityMethod::Sweep;
  report.range = Interval{lo, hi};

  std::vector<double> breaks;
  const auto samples = grid(lo, hi, coarse_step);
  bool prev = max_real_part_at(g, samples.front()) > 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const bool cur = max_real_part_at(g, samples[k]) > 0.0;
    if (cur != prev) breaks.push_back(bisect_crossing(g, samples[k - 1], samples[k], 1e-12));
    prev = cur;
  }
  // Tangential zero crossings do not change sign; take them from the QEP.
  for (double r : qep_solve(g).real_eigenvalues()) {
    if (r > lo && r < hi) breaks.push_back(r);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> unique;
  for (double b : breaks) {
    if (unique.empty() || b - unique.back() > 1e-6) unique.push_back(b);
  }

  auto classify_interval = [&](double, double, double s) { return classify_at(g, s); };
  assemble(g, unique, lo, hi, classify_interval, report);
  return report;
}

}  // namespace dcl
