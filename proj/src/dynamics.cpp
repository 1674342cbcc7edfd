#include "dcl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "dcl/error.hpp"
#include "dcl/qep.hpp"

namespace dcl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double inf_norm(const Vector& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

bool diverged(const Vector& x) {
  return !x.allFinite() || inf_norm(x) > kDivergenceBound;
}

Matrix kron_i2(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix out = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(2 * i, 2 * j) = m(i, j);
      out(2 * i + 1, 2 * j + 1) = m(i, j);
    }
  }
  return out;
}

// Records samples on a stride and always keeps the last one.
class Recorder {
 public:
  Recorder(Trajectory& traj, int stride) : traj_(traj), stride_(std::max(1, stride)) {}
  void push(long step, double t, const Vector& x, double s, bool force = false) {
    if (!force && step % stride_ != 0) return;
    if (!traj_.times.empty() && traj_.times.back() == t) return;
    traj_.times.push_back(t);
    traj_.states.push_back(x);
    traj_.s_values.push_back(s);
  }

 private:
  Trajectory& traj_;
  int stride_;
};

Trajectory run_schedule(const Graph& g, bool planar, const SwitchSchedule& schedule,
                        const Vector& x0, double dt, const IntegrateOptions& options) {
  schedule.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidParameter, "dt must be positive");
  }
  const int dim = planar ? 2 * g.order() : g.order();
  if (x0.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "initial state has dimension " +
                                                  std::to_string(x0.size()) + ", expected " +
                                                  std::to_string(dim));
  }
  const auto& segs = schedule.segments;
  std::vector<long> steps(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double end = i + 1 < segs.size() ? segs[i + 1].t_start : schedule.total_time;
    steps[i] = aligned_steps(end - segs[i].t_start, dt);
  }

  Trajectory traj;
  traj.graph = g.name();
  traj.planar = planar;
  Recorder rec(traj, options.record_stride);
  Rk4Stepper stepper(g, planar, segs.front().s);
  Vector x = x0;
  long k = 0;
  rec.push(0, 0.0, x, segs.front().s, true);

  for (std::size_t i = 0; i < segs.size(); ++i) {
    stepper.set_s(segs[i].s);
    const bool last_segment = i + 1 == segs.size();
    int quiet = 0;
    for (long j = 0; j < steps[i]; ++j) {
      stepper.step(x, dt);
      ++k;
      const double t = static_cast<double>(k) * dt;
      const bool segment_end = j + 1 == steps[i];
      const double s_now = (segment_end && !last_segment) ? segs[i + 1].s : segs[i].s;
      if (diverged(x)) {
        traj.status = RunStatus::Diverged;
        rec.push(k, t, x, s_now, true);
        return traj;
      }
      if (options.stop_at_steady_state && last_segment) {
        quiet = inf_norm(stepper.derivative(x)) < kSteadyDerivative ? quiet + 1 : 0;
        if (quiet >= kSteadySteps) {
          traj.status = RunStatus::Converged;
          rec.push(k, t, x, s_now, true);
          return traj;
        }
      }
      rec.push(k, t, x, s_now, segment_end);
    }
  }
  return traj;
}

// Sum over channels of the squared least-squares residual of
// y = a sin(wt) + b cos(wt) + c, on centered data.
struct ChannelFit {
  double a = 0.0, b = 0.0, c = 0.0, sse = 0.0;
};

ChannelFit fit_channel(const std::vector<double>& t, const std::vector<double>& y, double w) {
  const std::size_t m = t.size();
  Eigen::MatrixXd basis(m, 3);
  Eigen::VectorXd rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    basis(k, 0) = std::sin(w * t[k]);
    basis(k, 1) = std::cos(w * t[k]);
    basis(k, 2) = 1.0;
    rhs[k] = y[k];
  }
  const Eigen::Vector3d coef = basis.colPivHouseholderQr().solve(rhs);
  ChannelFit f{coef[0], coef[1], coef[2], (basis * coef - rhs).squaredNorm()};
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

void SwitchSchedule::validate() const {
  if (segments.empty()) throw Error(ErrorCode::InvalidParameter, "schedule has no segments");
  if (segments.front().t_start != 0.0) {
    throw Error(ErrorCode::InvalidParameter, "first segment must start at t = 0");
  }
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw Error(ErrorCode::InvalidParameter, "total time must be positive");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!std::isfinite(segments[i].s)) {
      throw Error(ErrorCode::InvalidParameter, "segment " + std::to_string(i) + " has non-finite s");
    }
    if (i > 0 && !(segments[i].t_start > segments[i - 1].t_start)) {
      throw Error(ErrorCode::InvalidParameter, "segment start times must increase strictly");
    }
  }
  if (!(segments.back().t_start < total_time)) {
    throw Error(ErrorCode::InvalidParameter, "last segment starts at or after the total time");
  }
}

double SwitchSchedule::s_at(double t) const {
  double s = segments.front().s;
  for (const auto& seg : segments) {
    if (seg.t_start <= t) s = seg.s;
  }
  return s;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Converged: return "converged";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

std::string to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::Zero: return "zero";
    case LimitKind::Limit: return "limit";
    case LimitKind::Oscillation: return "oscillation";
    case LimitKind::Divergent: return "divergent";
  }
  return "unknown";
}

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

Rk4Stepper::Rk4Stepper(const Graph& g, bool planar, double s)
    : bundle_(matrices(g)), planar_(planar), s_(s) {
  set_s(s);
}

void Rk4Stepper::set_s(double s) {
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidParameter, "s must be finite");
  s_ = s;
  const Matrix m = -deformed_laplacian(bundle_, s);
  system_ = planar_ ? kron_i2(m) : m;
}

void Rk4Stepper::step(Vector& x, double dt) const {
  const Vector k1 = system_ * x;
  const Vector k2 = system_ * (x + 0.5 * dt * k1);
  const Vector k3 = system_ * (x + 0.5 * dt * k2);
  const Vector k4 = system_ * (x + dt * k3);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

long aligned_steps(double length, double dt) {
  const double ratio = length / dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::StepMismatch, "dt = " + std::to_string(dt) +
                                             " does not divide a segment of length " +
                                             std::to_string(length));
  }
  return steps;
}

Trajectory integrate(const Graph& g, const SwitchSchedule& schedule, const Vector& x0, double dt,
                     const IntegrateOptions& options) {
  return run_schedule(g, false, schedule, x0, dt, options);
}

Trajectory planar_sim(const Graph& g, const SwitchSchedule& schedule, const Vector& p0, double dt,
                      const IntegrateOptions& options) {
  return run_schedule(g, true, schedule, p0, dt, options);
}

Matrix perron_matrix(const Graph& g, double s, double epsilon) {
  return Matrix::Identity(g.order(), g.order()) - epsilon * deformed_laplacian(g, s);
}

Trajectory discrete_run(const Graph& g, const PerronConfig& cfg, const Vector& x0,
                        const IntegrateOptions& options) {
  const int d_max = structure_probe(g).max_degree;
  const double upper = d_max > 0 ? 1.0 / d_max : std::numeric_limits<double>::infinity();
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < upper)) {
    throw Error(ErrorCode::EpsilonOutOfRange,
                "epsilon must lie in (0, 1/d_max) = (0, " + std::to_string(upper) + ")");
  }
  if (x0.size() != g.order()) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
  if (cfg.iterations < 0) throw Error(ErrorCode::InvalidParameter, "negative iteration count");

  const Matrix p = perron_matrix(g, cfg.s, cfg.epsilon);
  Trajectory traj;
  traj.graph = g.name();
  Recorder rec(traj, options.record_stride);
  Vector x = x0;
  rec.push(0, 0.0, x, cfg.s, true);
  int quiet = 0;
  for (int k = 1; k <= cfg.iterations; ++k) {
    Vector next = p * x;
    const double change = inf_norm(next - x);
    x = std::move(next);
    if (diverged(x)) {
      traj.status = RunStatus::Diverged;
      rec.push(k, k, x, cfg.s, true);
      return traj;
    }
    if (options.stop_at_steady_state) {
      quiet = change < kSteadyDerivative * cfg.epsilon ? quiet + 1 : 0;
      if (quiet >= kSteadySteps) {
        traj.status = RunStatus::Converged;
        rec.push(k, k, x, cfg.s, true);
        return traj;
      }
    }
    rec.push(k, k, x, cfg.s, k == cfg.iterations);
  }
  return traj;
}

LimitPrediction predicted_limit(const Graph& g, double s, const Vector& x0) {
  if (x0.size() != g.order()) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
  LimitPrediction out;
  const StabilityClass cls = classify_at(g, s);
  if (cls == StabilityClass::Unstable) {
    out.kind = LimitKind::Divergent;
    return out;
  }
  if (cls == StabilityClass::AsymptoticallyStable) {
    out.kind = LimitKind::Zero;
    out.limit = Vector::Zero(g.order());
    return out;
  }

  const MarginalMode mode = marginal_mode(g, s, /*require_simple=*/true);
  const Vector constant = mode.projector ? Vector(*mode.projector * x0) : Vector::Zero(g.order());
  if (!mode.oscillation) {
    out.kind = LimitKind::Limit;
    out.limit = constant;
    return out;
  }

  const int n = g.order();
  const Matrix m = -deformed_laplacian(g, s);
  const Complex iw(0.0, kTwoPi * mode.oscillation->frequency);
  const double threshold = std::max(tol::kRank * m.norm(), 2.0 * tol::kMarginal * std::max(1.0, m.norm()));
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const ComplexMatrix right = null_space(m.cast<Complex>() - iw * eye, threshold);
  const ComplexMatrix left = null_space(m.transpose().cast<Complex>() - iw * eye, threshold);
  if (right.cols() != 1 || left.cols() != 1) {
    throw Error(ErrorCode::MultiplicityAboveOne, "oscillating eigenvalue is not simple");
  }
  const ComplexVector u = right.col(0);
  const ComplexVector w = left.col(0);
  const Complex pairing = w.transpose() * u;
  const Complex weight = Complex(w.transpose() * x0.cast<Complex>()) / pairing;
  const ComplexVector q = u * weight;

  PredictedOscillation osc;
  osc.frequency = mode.oscillation->frequency;
  osc.offset = constant;
  const double ref = std::arg(q[0]);
  for (int i = 0; i < n; ++i) {
    osc.amplitudes.push_back(2.0 * std::abs(q[i]));
    osc.phases.push_back(wrap_angle(std::arg(q[i]) - ref));
  }
  out.kind = LimitKind::Oscillation;
  out.limit = constant;
  out.oscillation = std::move(osc);
  return out;
}

OscillationFit oscillation_fit(const Trajectory& traj, double t0, double t1) {
  constexpr std::size_t kMaxSamples = 4000;
  constexpr std::size_t kMinSamples = 16;
  if (!(t1 > t0)) throw Error(ErrorCode::WindowTooShort, "empty fit window");
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] >= t0 && traj.times[k] <= t1) idx.push_back(k);
  }
  if (idx.size() < kMinSamples) {
    throw Error(ErrorCode::WindowTooShort, "only " + std::to_string(idx.size()) +
                                               " samples inside the fit window");
  }
  const std::size_t stride = (idx.size() + kMaxSamples - 1) / kMaxSamples;
  std::vector<double> t;
  for (std::size_t k = 0; k < idx.size(); k += stride) t.push_back(traj.times[idx[k]]);
  const std::size_t m = t.size();
  const auto channels = static_cast<std::size_t>(traj.states.front().size());
  const double span = t.back() - t.front();
  const double sample_dt = span / double(m - 1);

  std::vector<std::vector<double>> y(channels, std::vector<double>(m));
  double variance = 0.0, scale = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      y[c][k] = traj.states[idx[k * stride]][c];
      mean += y[c][k];
      scale = std::max(scale, std::abs(y[c][k]));
    }
    mean /= double(m);
    for (auto& v : y[c]) {
      v -= mean;
      variance += v * v;
    }
  }
  if (!(variance > 1e-24 * double(m * channels) * std::max(1.0, scale * scale))) {
    throw Error(ErrorCode::FitDidNotConverge, "signal has no variation inside the window");
  }

  // Coarse periodogram over angular frequency, summed over channels.
  const double w_step = kTwoPi / (4.0 * span);
  const double w_max = std::numbers::pi / sample_dt;
  double best_w = w_step, best_power = -1.0;
  for (double w = w_step; w < w_max; w += w_step) {
    // Samples are uniform, so exp(i w t_k) advances by a fixed rotation.
    const Complex start = std::polar(1.0, w * t.front());
    const Complex turn = std::polar(1.0, w * sample_dt);
    double power = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      Complex phasor = start, acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        acc += y[c][k] * phasor;
        phasor *= turn;
      }
      power += std::norm(acc);
    }
    if (power > best_power) {
      best_power = power;
      best_w = w;
    }
  }

  auto total_sse = [&](double w) {
    double sse = 0.0;
    for (std::size_t c = 0; c < channels; ++c) sse += fit_channel(t, y[c], w).sse;
    return sse;
  };
  boost::uintmax_t iterations = 200;
  const auto [w_opt, sse] = boost::math::tools::brent_find_minima(
      total_sse, std::max(1e-12, best_w - w_step), best_w + w_step, 52, iterations);
  if (iterations >= 200 || !std::isfinite(w_opt)) {
    throw Error(ErrorCode::FitDidNotConverge, "frequency refinement did not converge");
  }

  OscillationFit fit;
  fit.frequency = w_opt / kTwoPi;
  fit.relative_residual = std::sqrt(sse / variance);
  double ref = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    const ChannelFit f = fit_channel(t, y[c], w_opt);
    const double phase = std::atan2(f.b, f.a);
    if (c == 0) ref = phase;
    fit.amplitudes.push_back(std::hypot(f.a, f.b));
    fit.phases.push_back(wrap_angle(phase - ref));
    double mean = 0.0;
    for (std::size_t k = 0; k < m; ++k) mean += traj.states[idx[k * stride]][c];
    fit.offsets.push_back(mean / double(m) + f.c);
  }
  return fit;
}

}  // namespace dcl
