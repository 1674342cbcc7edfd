#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcl/graph.hpp"
#include "dcl/linalg.hpp"

namespace dcl {

struct SpectrumEntry {
  Complex value;
  int multiplicity = 1;
};

enum class SpectrumProvenance { ClosedForm, Numeric };

/// Eigenvalues of -Delta(s) for a named family.
struct ClosedFormSpectrum {
  GraphFamily family;
  double s = 0.0;
  std::vector<SpectrumEntry> eigenvalues;
  SpectrumProvenance provenance = SpectrumProvenance::ClosedForm;

  int total_multiplicity() const;
  /// Every eigenvalue repeated by its multiplicity.
  std::vector<Complex> expanded() const;
};

ClosedFormSpectrum family_spectrum(const GraphFamily& family, double s);

/// Kinds of behavior at a marginal parameter value.
enum class MarginalTag {
  AverageConsensus,
  TwoGroups,
  KGroups,
  ConsensusOnFirst,
  StableOscillation,
};

std::string to_string(MarginalTag tag);

/// Open interval (lo, hi); infinite ends are +-infinity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double s) const { return s > lo && s < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct TaggedPoint {
  double s = 0.0;
  MarginalTag tag = MarginalTag::AverageConsensus;
};

/// Stability summary of one family member.
struct FamilyStability {
  GraphFamily family;
  std::vector<Interval> stable;
  std::vector<Interval> unstable;
  std::vector<TaggedPoint> marginal;
};

FamilyStability family_stability(const GraphFamily& family);

/// Non-unit root of the wheel's critical eigenvalue branch, in (0, 1/2].
double wheel_mu(int n);

/// Critical eigenvalue branch of the wheel W_n (the one that vanishes at mu and 1).
double wheel_critical_branch(int n, double s);

struct DirectedCycleOscillation {
  double theta = 0.0;      ///< marginal parameter value
  double frequency = 0.0;  ///< Hz
  std::vector<double> phases;
};

/// Oscillation constants of an odd directed cycle.
DirectedCycleOscillation directed_cycle_oscillation(int n);

}  // namespace dcl
