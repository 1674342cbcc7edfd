#include "dcl/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcl/error.hpp"

namespace dcl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNumericMultiplicityTol = 1e-7;

double binomial(int m, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r;
}

void push(std::vector<SpectrumEntry>& out, double value, int multiplicity) {
  if (multiplicity > 0) out.push_back({Complex(value, 0.0), multiplicity});
}

// Parabolas -c2 s^2 + 2 cos(2 pi k / p) s - 1 for k = k_first..p-1; k and p-k
// give the same value and share an entry.
void push_cycle_parabolas(std::vector<SpectrumEntry>& out, int p, int k_first, double c2, double s) {
  std::vector<int> count(p / 2 + 1, 0);
  for (int k = k_first; k < p; ++k) ++count[std::min(k, p - k)];
  for (int k = 0; k <= p / 2; ++k) {
    push(out, -c2 * s * s + 2.0 * std::cos(2.0 * kPi * k / p) * s - 1.0, count[k]);
  }
}

ClosedFormSpectrum numeric_spectrum(const GraphFamily& family, double s) {
  const Graph g = generate_family(family);
  const Matrix neg = -deformed_laplacian(g, s);
  ClosedFormSpectrum out{family, s, {}, SpectrumProvenance::Numeric};
  const Vector ev = symmetric_eigenvalues(neg);
  for (Eigen::Index i = 0; i < ev.size();) {
    Eigen::Index j = i + 1;
    while (j < ev.size() && ev[j] - ev[j - 1] < kNumericMultiplicityTol) ++j;
    const double mean = ev.segment(i, j - i).mean();
    out.eigenvalues.push_back({Complex(mean, 0.0), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

}  // namespace

int ClosedFormSpectrum::total_multiplicity() const {
  int total = 0;
  for (const auto& e : eigenvalues) total += e.multiplicity;
  return total;
}

std::vector<Complex> ClosedFormSpectrum::expanded() const {
  std::vector<Complex> out;
  for (const auto& e : eigenvalues) out.insert(out.end(), e.multiplicity, e.value);
  return out;
}

double wheel_critical_branch(int n, double s) {
  const double root = std::sqrt(std::pow((n - 4) * s + 2.0, 2) + 4.0 * (n - 1));
  return -0.5 * n * s * s + s + 0.5 * root * s - 1.0;
}

namespace {

double wheel_other_branch(int n, double s) {
  const double root = std::sqrt(std::pow((n - 4) * s + 2.0, 2) + 4.0 * (n - 1));
  return -0.5 * n * s * s + s - 0.5 * root * s - 1.0;
}

double wheel_critical_derivative(int n, double s) {
  const double inner = (n - 4) * s + 2.0;
  const double root = std::sqrt(inner * inner + 4.0 * (n - 1));
  return -n * s + 1.0 + 0.5 * root + 0.5 * s * inner * (n - 4) / root;
}

}  // namespace

ClosedFormSpectrum family_spectrum(const GraphFamily& family, double s) {
  family.validate();
  ClosedFormSpectrum out{family, s, {}, SpectrumProvenance::ClosedForm};
  auto& ev = out.eigenvalues;
  const int n = family.order();
  switch (family.kind) {
    case FamilyKind::Path:
    case FamilyKind::MaryTree:
      return numeric_spectrum(family, s);
    case FamilyKind::Cycle:
      push_cycle_parabolas(ev, n, 0, 1.0, s);
      break;
    case FamilyKind::Wheel: {
      push(ev, wheel_critical_branch(n, s), 1);
      push(ev, wheel_other_branch(n, s), 1);
      push_cycle_parabolas(ev, n - 1, 1, 2.0, s);
      break;
    }
    case FamilyKind::Hypercube: {
      const int m = family.a;
      for (int l = 0; l <= m; ++l) {
        push(ev, -(m - 1) * s * s + (m - 2 * l) * s - 1.0, static_cast<int>(binomial(m, l)));
      }
      break;
    }
    case FamilyKind::Petersen:
      push(ev, -2 * s * s + 3 * s - 1, 1);
      push(ev, -2 * s * s + s - 1, 5);
      push(ev, -2 * s * s - 2 * s - 1, 4);
      break;
    case FamilyKind::Complete:
      push(ev, -(n - 2) * s * s + (n - 1) * s - 1, 1);
      push(ev, -(n - 2) * s * s - s - 1, n - 1);
      break;
    case FamilyKind::CompleteBipartite:
    case FamilyKind::Star: {
      // The star K_{1,n} is the complete bipartite graph with |V1| = 1.
      const int m = family.kind == FamilyKind::Star ? 1 : family.a;
      const int q = family.kind == FamilyKind::Star ? family.a : family.b;
      const double root = std::sqrt(double(q - m) * (q - m) * s * s + 4.0 * m * q);
      const double c = 0.5 * (q + m - 2);
      push(ev, -c * s * s + 0.5 * root * s - 1, 1);
      push(ev, -c * s * s - 0.5 * root * s - 1, 1);
      push(ev, -((m - 1) * s * s + 1), q - 1);
      push(ev, -((q - 1) * s * s + 1), m - 1);
      break;
    }
    case FamilyKind::DirectedPath:
      push(ev, s * s - 1, 1);
      push(ev, -1.0, n - 1);
      break;
    case FamilyKind::DirectedCycle:
      for (int i = 1; i <= n; ++i) {
        const double angle = 2.0 * kPi * double(i - 1) * double(n - 1) / n;
        ev.push_back({s * std::polar(1.0, angle) - 1.0, 1});
      }
      break;
  }
  return out;
}

std::string to_string(MarginalTag tag) {
  switch (tag) {
    case MarginalTag::AverageConsensus: return "average-consensus";
    case MarginalTag::TwoGroups: return "two-groups";
    case MarginalTag::KGroups: return "k-groups";
    case MarginalTag::ConsensusOnFirst: return "consensus-on-x1";
    case MarginalTag::StableOscillation: return "stable-oscillation";
  }
  return "unknown";
}

double wheel_mu(int n) {
  if (n <= 3) throw Error(ErrorCode::ParameterOutOfRange, "wheel_mu requires n > 3");
  double lo = 1e-9;
  double hi = 0.5 + 1e-9;
  double f_lo = wheel_critical_branch(n, lo);
  const double f_hi = wheel_critical_branch(n, hi);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw Error(ErrorCode::RootNotBracketed, "critical branch keeps its sign on (0, 1/2]");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = wheel_critical_branch(n, mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double f = wheel_critical_branch(n, mu);
    if (std::abs(f) < 1e-14) break;
    mu -= f / wheel_critical_derivative(n, mu);
  }
  if (std::abs(wheel_critical_branch(n, mu)) > 1e-12) {
    throw Error(ErrorCode::RootNotBracketed, "Newton polish did not reach 1e-12 residual");
  }
  return mu;
}

namespace {

double directed_cycle_angle(int n) { return (double(n) * (n - 2) + 1.0) / n * kPi; }

}  // namespace

DirectedCycleOscillation directed_cycle_oscillation(int n) {
  if (n <= 2 || n % 2 == 0) {
    throw Error(ErrorCode::ParameterOutOfRange, "directed-cycle oscillation needs odd n > 2");
  }
  const double angle = directed_cycle_angle(n);
  DirectedCycleOscillation out;
  out.theta = 1.0 / std::cos(angle);
  out.frequency = std::tan(angle) / (2.0 * kPi);
  for (int i = 1; i <= n; ++i) {
    out.phases.push_back(2.0 * kPi * (i - 1) / (n * std::tan(angle)));
  }
  return out;
}

FamilyStability family_stability(const GraphFamily& family) {
  family.validate();
  FamilyStability out{family, {}, {}, {}};
  using T = MarginalTag;
  auto& st = out.stable;
  auto& un = out.unstable;
  auto& mg = out.marginal;
  const int n = family.order();

  // Shape shared by Path, MaryTree, Star and the directed path/even cycle.
  auto unit_band = [&](T at_minus_one, T at_one) {
    st = {{-1.0, 1.0}};
    un = {{-kInf, -1.0}, {1.0, kInf}};
    mg = {{-1.0, at_minus_one}, {1.0, at_one}};
  };
  // Stable outside (tau, 1), with tau < 1 marginal.
  auto upper_gap = [&](double tau, T at_tau) {
    if (tau < 1.0) {
      st = {{-kInf, tau}, {1.0, kInf}};
      un = {{tau, 1.0}};
      mg = {{tau, at_tau}, {1.0, T::AverageConsensus}};
    } else {
      st = {{-kInf, 1.0}, {1.0, kInf}};
      mg = {{1.0, T::AverageConsensus}};
    }
  };
  // Stable for |s| > 1 or |s| < tau; marginal at -1, -tau, tau, 1.
  auto symmetric_gaps = [&](double tau, T at_minus, T at_plus) {
    if (tau < 1.0) {
      st = {{-kInf, -1.0}, {-tau, tau}, {1.0, kInf}};
      un = {{-1.0, -tau}, {tau, 1.0}};
      mg = {{-1.0, T::TwoGroups}, {-tau, at_minus}, {tau, at_plus}, {1.0, T::AverageConsensus}};
    } else {
      st = {{-kInf, -1.0}, {-1.0, 1.0}, {1.0, kInf}};
      mg = {{-1.0, T::TwoGroups}, {1.0, T::AverageConsensus}};
    }
  };

  switch (family.kind) {
    case FamilyKind::Path:
    case FamilyKind::MaryTree:
    case FamilyKind::Star:
      unit_band(T::TwoGroups, T::AverageConsensus);
      break;
    case FamilyKind::Cycle:
      if (n % 2 == 0) {
        st = {{-kInf, -1.0}, {-1.0, 1.0}, {1.0, kInf}};
        mg = {{-1.0, T::TwoGroups}, {1.0, T::AverageConsensus}};
      } else {
        st = {{-kInf, 1.0}, {1.0, kInf}};
        mg = {{1.0, T::AverageConsensus}};
      }
      break;
    case FamilyKind::Wheel:
      upper_gap(wheel_mu(n), n == 4 ? T::AverageConsensus : T::TwoGroups);
      break;
    case FamilyKind::Hypercube:
      symmetric_gaps(1.0 / (family.a - 1), T::TwoGroups, T::AverageConsensus);
      break;
    case FamilyKind::Petersen:
      upper_gap(0.5, T::AverageConsensus);
      break;
    case FamilyKind::Complete:
      upper_gap(1.0 / (n - 2), T::AverageConsensus);
      break;
    case FamilyKind::CompleteBipartite: {
      const double tau = 1.0 / std::sqrt(double(family.a - 1) * (family.b - 1));
      symmetric_gaps(tau, T::TwoGroups, family.a == family.b ? T::AverageConsensus : T::TwoGroups);
      break;
    }
    case FamilyKind::DirectedPath:
      unit_band(T::TwoGroups, T::ConsensusOnFirst);
      break;
    case FamilyKind::DirectedCycle:
      if (n % 2 == 0) {
        unit_band(T::TwoGroups, T::AverageConsensus);
      } else {
        const double theta = directed_cycle_oscillation(n).theta;
        st = {{theta, 1.0}};
        un = {{-kInf, theta}, {1.0, kInf}};
        mg = {{theta, T::StableOscillation}, {1.0, T::AverageConsensus}};
      }
      break;
  }
  return out;
}

}  // namespace dcl
