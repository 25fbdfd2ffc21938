#pragma once

// Independent reference implementations used to validate the library:
// finite differences, quadrature, polynomial roots via the companion matrix,
// and a least-squares conic fit.  Deliberately simple and slow.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#ifdef QRELAX_HAVE_EIGEN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#endif

namespace oracles {

using Complex = std::complex<double>;

// Fourth-order central difference; works for real- and complex-valued f.
template <class F>
auto fd_derivative(const F& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

#ifdef QRELAX_HAVE_EIGEN

// Roots of sum_k c[k] z^k as eigenvalues of the companion matrix.
inline std::vector<Complex> polynomial_roots(std::vector<Complex> c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> roots(deg);
  for (int i = 0; i < deg; ++i) roots[i] = solver.eigenvalues()(i);
  return roots;
}

inline int roots_in_unit_disk(const std::vector<Complex>& coeffs) {
  int inside = 0;
  for (const Complex& r : polynomial_roots(coeffs))
    if (std::abs(r) < 1.0) ++inside;
  return inside;
}

struct ConicFit {
  // x^2 + B xy + C y^2 + D x + E y + F = 0, least squares with A fixed to 1
  double B, C, D, E, F;
  bool is_ellipse() const { return B * B - 4.0 * C < 0.0; }

  double semi_major = 0.0, semi_minor = 0.0, orientation = 0.0;
};

inline ConicFit fit_conic(const std::vector<std::pair<double, double>>& pts) {
  Eigen::MatrixXd M(pts.size(), 5);
  Eigen::VectorXd rhs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [x, y] = pts[i];
    M(i, 0) = x * y;
    M(i, 1) = y * y;
    M(i, 2) = x;
    M(i, 3) = y;
    M(i, 4) = 1.0;
    rhs(i) = -x * x;
  }
  const Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
  ConicFit fit{sol(0), sol(1), sol(2), sol(3), sol(4)};

  // principal axes of the quadratic form [[1, B/2], [B/2, C]]
  Eigen::Matrix2d Q;
  Q << 1.0, fit.B / 2.0, fit.B / 2.0, fit.C;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q);
  const double l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
  // centre from gradient = 0
  const Eigen::Vector2d centre = -0.5 * Q.inverse() * Eigen::Vector2d(fit.D, fit.E);
  const double k = centre(0) * centre(0) + fit.B * centre(0) * centre(1) +
                   fit.C * centre(1) * centre(1) - fit.F;
  // lengths: axis_i = sqrt(k / lambda_i)
  const double a1 = std::sqrt(std::abs(k / l1)), a2 = std::sqrt(std::abs(k / l2));
  fit.semi_major = std::max(a1, a2);
  fit.semi_minor = std::min(a1, a2);
  const int major_idx = a1 >= a2 ? 0 : 1;
  fit.orientation = std::atan2(es.eigenvectors()(1, major_idx), es.eigenvectors()(0, major_idx));
  if (fit.orientation < 0.0) fit.orientation += M_PI;
  if (fit.orientation >= M_PI) fit.orientation -= M_PI;
  return fit;
}

#endif  // QRELAX_HAVE_EIGEN

}  // namespace oracles
