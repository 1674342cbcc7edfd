#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dcl/analysis.hpp"
#include "dcl/error.hpp"
#include "dcl/qep.hpp"
#include "dcl/scenario.hpp"
#include "test_support.hpp"

using namespace dcl;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ParseError;
}

void check_coefficients(const Polynomial& q, const Polynomial& expected, double tol) {
  for (std::size_t i = 0; i < std::max(q.size(), expected.size()); ++i) {
    const double a = i < q.size() ? q[i] : 0.0;
    const double b = i < expected.size() ? expected[i] : 0.0;
    CAPTURE(i);
    CHECK(std::abs(a - b) < tol);
  }
}

bool near_pair(double a, double b, double x, double y, double tol) {
  return (std::abs(a - x) < tol && std::abs(b - y) < tol) || (std::abs(a - y) < tol && std::abs(b - x) < tol);
}

}  // namespace

TEST_CASE("q(s) of the path on six vertices and the star with three leaves is 1 - s^2") {
  check_coefficients(q_poly(generate_family(GraphFamily::path(6))), {1.0, 0.0, -1.0}, 1e-9);
  check_coefficients(q_poly(generate_family(GraphFamily::star(3))), {1.0, 0.0, -1.0}, 1e-9);
}

TEST_CASE("cycle determinant identity") {
  for (int n : {3, 4, 5, 6, 8}) {
    const Polynomial q = q_poly(generate_family(GraphFamily::cycle(n)));
    for (int k = 0; k < 20; ++k) {
      const double s = -1.9 + 0.2 * k;
      const double expected = (n % 2 ? -1.0 : 1.0) * (std::pow(s, 2 * n) - 2.0 * std::pow(s, n) + 1.0);
      CAPTURE(n);
      CAPTURE(s);
      CHECK(std::abs(evaluate(q, s) - expected) <= 1e-8 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("q(s) agrees with the dense determinant on random graphs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_connected_graph(rng, 3 + trial % 8, 0.35);
    const Polynomial q = q_poly(g);
    for (double s : {-1.7, -0.6, 0.25, 0.9, 1.6}) {
      const double det = testing::reference_system(g, s).determinant();
      CHECK(std::abs(evaluate(q, s) - det) <= 1e-7 * std::max(1.0, std::abs(det)));
    }
  }
}

TEST_CASE("QEP eigenpairs have small residuals and real eigenvalues are roots of q") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 15; ++trial) {
    const Graph g = testing::random_connected_graph(rng, 4 + trial % 6, 0.3);
    const QepResult r = qep_solve(g);
    CHECK(static_cast<int>(r.finite_eigenvalues.size()) == r.degree_r);
    CHECK(r.degree_r + r.infinite_count == 2 * g.order());
    for (std::size_t i = 0; i < r.finite_eigenvalues.size(); ++i) {
      CHECK(residual(g, r.finite_eigenvalues[i], r.right_eigenvectors[i]) < 1e-8);
    }
    for (double lambda : r.real_eigenvalues()) {
      CHECK(std::abs(testing::reference_system(g, lambda).determinant()) < 1e-6);
    }
  }
}

TEST_CASE("pendant vertices produce infinite eigenvalues") {
  const QepResult path = qep_solve(generate_family(GraphFamily::path(6)));
  CHECK(path.infinite_count > 0);
  CHECK(path.degree_r == 2);
  const QepResult cycle = qep_solve(generate_family(GraphFamily::cycle(6)));
  CHECK(cycle.infinite_count == 0);
}

TEST_CASE("residual rejects a zero vector") {
  const Graph g = generate_family(GraphFamily::cycle(4));
  CHECK(code_of([&] { residual(g, Complex(1.0, 0.0), ComplexVector::Zero(4)); }) == ErrorCode::ZeroVector);
}

TEST_CASE("numeric stability intervals agree with the closed forms") {
  const char* specs[] = {"path:6",      "cycle:5",  "cycle:6",    "mtree:2:3", "wheel:5", "hypercube:3",
                         "petersen",    "complete:5", "kbip:2:3", "kbip:3:3",  "star:4"};
  for (const char* spec : specs) {
    CAPTURE(spec);
    const auto family = GraphFamily::parse(spec);
    const auto numeric = stability_intervals(generate_family(family));
    const auto closed = stability_report(family_stability(family));
    CHECK(numeric.method == StabilityMethod::QepSignRule);
    REQUIRE(numeric.stable.size() == closed.stable.size());
    REQUIRE(numeric.unstable.size() == closed.unstable.size());
    REQUIRE(numeric.marginal.size() == closed.marginal.size());
    auto same_end = [](double a, double b) { return std::isinf(a) ? a == b : std::abs(a - b) < 1e-6; };
    for (std::size_t i = 0; i < closed.stable.size(); ++i) {
      CHECK(same_end(numeric.stable[i].lo, closed.stable[i].lo));
      CHECK(same_end(numeric.stable[i].hi, closed.stable[i].hi));
    }
    for (std::size_t i = 0; i < closed.unstable.size(); ++i) {
      CHECK(same_end(numeric.unstable[i].lo, closed.unstable[i].lo));
      CHECK(same_end(numeric.unstable[i].hi, closed.unstable[i].hi));
    }
    for (std::size_t i = 0; i < closed.marginal.size(); ++i) CHECK(same_end(numeric.marginal[i].s, closed.marginal[i].s));
  }
}

TEST_CASE("intervals agree with pointwise classification") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testing::random_connected_graph(rng, 4 + trial % 7, 0.3);
    const auto report = stability_intervals(g);
    for (const auto& iv : report.stable) {
      const double lo = std::isinf(iv.lo) ? iv.hi - 3.0 : iv.lo;
      const double hi = std::isinf(iv.hi) ? lo + 3.0 : iv.hi;
      const double mid = 0.5 * (lo + hi);
      CHECK(max_real_part_at(g, mid) < 0.0);
    }
    for (const auto& iv : report.unstable) {
      const double lo = std::isinf(iv.lo) ? iv.hi - 3.0 : iv.lo;
      const double hi = std::isinf(iv.hi) ? lo + 3.0 : iv.hi;
      CHECK(max_real_part_at(g, 0.5 * (lo + hi)) > 0.0);
    }
    for (const auto& m : report.marginal) CHECK(std::abs(max_real_part_at(g, m.s)) < 1e-6);
  }
}

TEST_CASE("sign rule preconditions") {
  CHECK(code_of([] { stability_intervals(generate_family(GraphFamily::directed_cycle(5))); }) ==
        ErrorCode::NotUndirected);
  CHECK(code_of([] { stability_intervals(build_graph(4, {{1, 2}, {3, 4}}, false)); }) == ErrorCode::Disconnected);
}

TEST_CASE("pointwise classification") {
  const Graph g = generate_family(GraphFamily::path(6));
  CHECK(classify_at(g, 0.0) == StabilityClass::AsymptoticallyStable);
  CHECK(classify_at(g, 1.0) == StabilityClass::MarginallyStable);
  CHECK(classify_at(g, -1.0) == StabilityClass::MarginallyStable);
  CHECK(classify_at(g, 1.5) == StabilityClass::Unstable);
}

TEST_CASE("marginal modes of the path") {
  const Graph g = generate_family(GraphFamily::path(6));
  SUBCASE("average consensus at s = 1") {
    const auto mode = marginal_mode(g, 1.0, true);
    CHECK(mode.kind == ModeKind::AverageConsensus);
    REQUIRE(mode.projector);
    CHECK((*mode.projector - Matrix::Constant(6, 6, 1.0 / 6.0)).norm() < 1e-9);
  }
  SUBCASE("bipartite consensus at s = -1") {
    const auto mode = marginal_mode(g, -1.0, true);
    CHECK(mode.kind == ModeKind::BipartiteConsensus);
    REQUIRE(mode.groups.size() == 2);
    CHECK(mode.groups[0] == std::vector<int>{1, 3, 5});
    CHECK(mode.groups[1] == std::vector<int>{2, 4, 6});
    Vector k(6);
    k << 1, -1, 1, -1, 1, -1;
    REQUIRE(mode.projector);
    CHECK((*mode.projector - k * k.transpose() / 6.0).norm() < 1e-9);
  }
  SUBCASE("not marginal") { CHECK(code_of([&] { marginal_mode(g, 0.5); }) == ErrorCode::NotMarginal); }
}

TEST_CASE("marginal zero modes lie in the kernel of Delta") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testing::random_connected_graph(rng, 4 + trial % 6, 0.3);
    for (const auto& m : stability_intervals(g).marginal) {
      const auto mode = marginal_mode(g, m.s);
      if (!mode.zero_eigvec) continue;
      const Vector& z = *mode.zero_eigvec;
      CHECK(z.norm() == doctest::Approx(1.0));
      CHECK((testing::reference_system(g, m.s) * z).norm() < 1e-6);
      if (mode.projector) CHECK((*mode.projector * *mode.projector - *mode.projector).norm() < 1e-6);
    }
  }
}

TEST_CASE("directed cycle oscillation mode") {
  const auto osc = directed_cycle_oscillation(5);
  const auto mode = marginal_mode(generate_family(GraphFamily::directed_cycle(5)), osc.theta);
  CHECK(mode.kind == ModeKind::Oscillation);
  REQUIRE(mode.oscillation);
  CHECK(mode.oscillation->frequency == doctest::Approx(std::tan(pi / 5.0) / (2.0 * pi)));
  for (double a : mode.oscillation->amplitudes) CHECK(a == doctest::Approx(mode.oscillation->amplitudes[0]));
}

TEST_CASE("directed consensus needs a uniform left vector for average consensus") {
  const auto mode = marginal_mode(generate_family(GraphFamily::directed_cycle(5)), 1.0, true);
  CHECK(mode.kind == ModeKind::AverageConsensus);
  const auto chorded = marginal_mode(chorded_directed_cycle(false), 1.0, true);
  CHECK(chorded.kind == ModeKind::Consensus);
  REQUIRE(chorded.projector);
  // every row of the projector is the same left vector, summing to one
  for (int i = 1; i < 5; ++i) CHECK((chorded.projector->row(i) - chorded.projector->row(0)).norm() < 1e-9);
  CHECK(chorded.projector->row(0).sum() == doctest::Approx(1.0));
}

TEST_CASE("threshold sweep on the chorded directed cycles") {
  const double a = sweep_threshold(chorded_directed_cycle(false), -3.0, 0.0, 1e-2);
  const double b = sweep_threshold(chorded_directed_cycle(true), -3.0, 0.0, 1e-2);
  CHECK(near_pair(a, b, -1.6889, -1.9441, 1e-3));
  CHECK(sweep_threshold(generate_family(GraphFamily::directed_cycle(5)), -2.0, 0.0, 1e-2) ==
        doctest::Approx(1.0 / std::cos(16.0 * pi / 5.0)).epsilon(1e-6));
  CHECK(code_of([] { sweep_threshold(generate_family(GraphFamily::path(4)), 0.0, 0.5, 1e-2); }) ==
        ErrorCode::NoBracket);
}

TEST_CASE("sweep report on the directed cycle") {
  const auto report = sweep_report(generate_family(GraphFamily::directed_cycle(5)));
  CHECK(report.method == StabilityMethod::Sweep);
  REQUIRE(report.range);
  CHECK(report.range->lo == -5.0);
  CHECK(report.range->hi == 5.0);
  bool theta = false, one = false;
  for (const auto& m : report.marginal) {
    theta = theta || std::abs(m.s - 1.0 / std::cos(16.0 * pi / 5.0)) < 1e-6;
    one = one || std::abs(m.s - 1.0) < 1e-6;
  }
  CHECK(theta);
  CHECK(one);
}

TEST_CASE("analysis dispatcher") {
  const auto family = GraphFamily::cycle(6);
  CHECK(analyze({generate_family(family), family}).method == StabilityMethod::ClosedForm);
  CHECK(analyze({generate_family(family), std::nullopt}).method == StabilityMethod::QepSignRule);
  CHECK(analyze({chorded_directed_cycle(false), std::nullopt}).method == StabilityMethod::Sweep);
  CHECK(analyze({generate_family(family), family}, AnalysisMethod::Sweep).method == StabilityMethod::Sweep);
  CHECK(code_of([&] { analyze({generate_family(family), std::nullopt}, AnalysisMethod::ClosedForm); }) ==
        ErrorCode::InvalidParameter);
  CHECK(analysis_method_from_string("qep-sign-rule") == AnalysisMethod::SignRule);
}
