#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcl/graph.hpp"
#include "dcl/linalg.hpp"

namespace dcl {

struct SwitchSegment {
  double t_start = 0.0;
  double s = 1.0;
  friend bool operator==(const SwitchSegment&, const SwitchSegment&) = default;
};

/// Piecewise-constant s(t) on [0, total_time).
struct SwitchSchedule {
  std::vector<SwitchSegment> segments;
  double total_time = 0.0;

  static SwitchSchedule constant(double s, double total_time) { return {{{0.0, s}}, total_time}; }

  /// Throws InvalidParameter unless segments start at 0, increase strictly,
  /// start before total_time and carry finite s.
  void validate() const;
  double s_at(double t) const;
  friend bool operator==(const SwitchSchedule&, const SwitchSchedule&) = default;
};

enum class RunStatus { Completed, Converged, Diverged };
std::string to_string(RunStatus status);

struct Trajectory {
  std::string graph;
  bool planar = false;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> s_values;  ///< s in effect at each sample time
  RunStatus status = RunStatus::Completed;

  const Vector& final_state() const { return states.back(); }
};

struct IntegrateOptions {
  int record_stride = 1;  ///< keep every k-th step; segment ends are always kept
  bool stop_at_steady_state = false;  ///< in the last segment, stop once ||dx/dt||_inf < 1e-9 for 100 steps
};

inline constexpr double kDivergenceBound = 1e9;
inline constexpr double kSteadyDerivative = 1e-9;
inline constexpr int kSteadySteps = 100;

/// Classical RK4 for dx/dt = -Delta(s) x, optionally lifted to the plane as
/// (-Delta(s) kron I2). Integration, planar simulation and live sessions all
/// step through this class, so identical command sequences give identical bits.
class Rk4Stepper {
 public:
  Rk4Stepper(const Graph& g, bool planar, double s);

  void set_s(double s);
  double s() const { return s_; }
  int dimension() const { return static_cast<int>(system_.rows()); }
  const Matrix& system() const { return system_; }

  /// Advances `x` in place by one step of size dt.
  void step(Vector& x, double dt) const;
  Vector derivative(const Vector& x) const { return system_ * x; }

 private:
  MatrixBundle bundle_;
  bool planar_;
  double s_;
  Matrix system_;
};

/// Number of whole dt steps in `length`; throws StepMismatch when dt does not divide it.
long aligned_steps(double length, double dt);

/// Throws StepMismatch, DimensionMismatch, InvalidParameter.
Trajectory integrate(const Graph& g, const SwitchSchedule& schedule, const Vector& x0, double dt,
                     const IntegrateOptions& options = {});

/// Same as integrate on the 2n-dimensional state [p1x, p1y, p2x, p2y, ...].
Trajectory planar_sim(const Graph& g, const SwitchSchedule& schedule, const Vector& p0, double dt,
                      const IntegrateOptions& options = {});

struct PerronConfig {
  double epsilon = 0.0;
  double s = 1.0;
  int iterations = 1000;
};

/// P(s) = I - epsilon Delta(s).
Matrix perron_matrix(const Graph& g, double s, double epsilon);

/// Iterates x(k+1) = P(s) x(k). Times are step indices. Throws EpsilonOutOfRange.
Trajectory discrete_run(const Graph& g, const PerronConfig& cfg, const Vector& x0,
                        const IntegrateOptions& options = {});

struct PredictedOscillation {
  double frequency = 0.0;          ///< Hz
  Vector offset;                   ///< constant part of the limit
  std::vector<double> amplitudes;  ///< per vertex
  std::vector<double> phases;      ///< sine convention, relative to vertex 1, in (-pi, pi]
};

enum class LimitKind { Zero, Limit, Oscillation, Divergent };
std::string to_string(LimitKind kind);

struct LimitPrediction {
  LimitKind kind = LimitKind::Zero;
  std::optional<Vector> limit;
  std::optional<PredictedOscillation> oscillation;
};

/// Long-run behavior of dx/dt = -Delta(s) x from x0. Throws MultiplicityAboveOne
/// when a critical eigenvalue is not simple.
LimitPrediction predicted_limit(const Graph& g, double s, const Vector& x0);

struct OscillationFit {
  double frequency = 0.0;  ///< Hz
  std::vector<double> amplitudes;
  std::vector<double> phases;   ///< relative to channel 1, in (-pi, pi]
  std::vector<double> offsets;
  double relative_residual = 0.0;  ///< rms(fit error) / rms(centered signal)
};

/// Least-squares fit of x_i(t) = c_i + A_i sin(2 pi f t + phi_i) with one common f
/// over the samples with t0 <= t <= t1. Throws WindowTooShort, FitDidNotConverge.
OscillationFit oscillation_fit(const Trajectory& traj, double t0, double t1);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace dcl
