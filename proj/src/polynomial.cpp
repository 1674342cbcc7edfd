#include "dcl/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dcl {

double evaluate(const Polynomial& p, double s) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Complex evaluate(const Polynomial& p, Complex s) {
  Complex acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial chebyshev_interpolate(const std::function<double(double)>& f, int degree,
                                 double half_width) {
  const int count = degree + 1;
  std::vector<double> nodes(count), values(count);
  for (int j = 0; j < count; ++j) {
    nodes[j] = std::cos(std::numbers::pi * (j + 0.5) / count);
    values[j] = f(half_width * nodes[j]);
  }

  // Chebyshev coefficients by discrete orthogonality.
  std::vector<double> cheb(count, 0.0);
  for (int k = 0; k < count; ++k) {
    double acc = 0.0;
    for (int j = 0; j < count; ++j) {
      acc += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / count);
    }
    cheb[k] = acc * 2.0 / count;
  }
  cheb[0] *= 0.5;

  // Sum c_k T_k(t) in the monomial basis of t, then rescale t = s / half_width.
  Polynomial mono(count, 0.0);
  std::vector<double> t_prev(count, 0.0), t_cur(count, 0.0), t_next(count, 0.0);
  t_prev[0] = 1.0;  // T_0
  if (count > 1) t_cur[1] = 1.0;  // T_1
  for (int k = 0; k < count; ++k) {
    const auto& tk = (k == 0) ? t_prev : t_cur;
    for (int i = 0; i <= k; ++i) mono[i] += cheb[k] * tk[i];
    if (k >= 1 && k + 1 < count) {
      std::fill(t_next.begin(), t_next.end(), 0.0);
      for (int i = 0; i <= k; ++i) t_next[i + 1] += 2.0 * t_cur[i];
      for (int i = 0; i < k; ++i) t_next[i] -= t_prev[i];
      std::swap(t_prev, t_cur);
      std::swap(t_cur, t_next);
    }
  }
  double scale = 1.0;
  for (int i = 0; i < count; ++i) {
    mono[i] /= scale;
    scale *= half_width;
  }
  return mono;
}

Polynomial trim(Polynomial p, double rel_tol) {
  double peak = 0.0;
  for (double c : p) peak = std::max(peak, std::abs(c));
  while (!p.empty() && std::abs(p.back()) < rel_tol * peak) p.pop_back();
  return p;
}

std::vector<Complex> roots(const Polynomial& p) {
  auto q = trim(p, 0.0);
  while (!q.empty() && q.back() == 0.0) q.pop_back();
  const int degree = static_cast<int>(q.size()) - 1;
  if (degree < 1) return {};
  Matrix companion = Matrix::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -q[i] / q[degree];
  const ComplexVector ev = eigenvalues(companion);
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<RealRoot> real_roots(const Polynomial& p, double cluster_tol, double imag_tol) {
  const auto all = roots(p);
  const int count = static_cast<int>(all.size());

  // Single-linkage clustering in the complex plane.
  std::vector<int> label(count, -1);
  int clusters = 0;
  for (int i = 0; i < count; ++i) {
    if (label[i] != -1) continue;
    label[i] = clusters;
    std::vector<int> stack{i};
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < count; ++b) {
        if (label[b] == -1 && std::abs(all[a] - all[b]) < cluster_tol) {
          label[b] = clusters;
          stack.push_back(b);
        }
      }
    }
    ++clusters;
  }

  std::vector<RealRoot> out;
  for (int c = 0; c < clusters; ++c) {
    Complex sum = 0.0;
    int size = 0;
    for (int i = 0; i < count; ++i) {
      if (label[i] == c) {
        sum += all[i];
        ++size;
      }
    }
    const Complex centroid = sum / double(size);
    if (std::abs(centroid.imag()) < imag_tol * std::max(1.0, std::abs(centroid))) {
      out.push_back({centroid.real(), size});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
  return out;
}

}  // namespace dcl
