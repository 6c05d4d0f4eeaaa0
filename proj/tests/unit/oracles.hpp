#pragma once
// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// J0 by its power series
inline double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  const double q = -0.25 * x * x;
  for (int k = 1; k < 80; ++k) {
    term *= q / (double(k) * double(k));
    sum += term;
  }
  return sum;
}

inline double j01() { return bisect(bessel_j0, 2.0, 3.0); }

// standard normal upper tail by quadrature
inline double normal_tail(double r) {
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return simpson([c](double t) { return c * std::exp(-0.5 * t * t); }, r, r + 40.0, 200000);
}

inline double normal_tail_inverse(double p) {
  return bisect([p](double r) { return normal_tail(r) - p; }, -10.0, 10.0);
}

// int over B_1 of prod x_i^alpha_i restricted to x_i > 0, dim 2, polar coordinates
inline double cone_constant_2d(const std::vector<double>& alpha) {
  const double a1 = alpha[0], a2 = alpha.size() > 1 ? alpha[1] : 0.0;
  const bool full_y = alpha.size() < 2;
  const double lo = full_y ? -0.5 * std::numbers::pi : 0.0;
  auto ang = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    return std::pow(c, a1) * (full_y ? 1.0 : std::pow(s, a2));
  };
  const double angular = simpson(ang, lo, 0.5 * std::numbers::pi, 40000);
  return angular / (2.0 + a1 + a2);
}

// smallest eigenvalue of -(e^W u')' = lambda e^W u on (a, b), u(a) = u(b) = 0
inline double sturm_liouville_min(const std::function<double(double)>& W, double a, double b, int n,
                                  bool neumann_right = false) {
  const double h = (b - a) / n;
  const int m = neumann_right ? n : n - 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m), M = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double x = a + (i + 1) * h;
    const double wl = std::exp(W(x - 0.5 * h)), wr = std::exp(W(x + 0.5 * h));
    K(i, i) += wl / (h * h);
    if (!(neumann_right && i == m - 1)) K(i, i) += wr / (h * h);
    if (i > 0) K(i, i - 1) -= wl / (h * h);
    if (i + 1 < m) K(i, i + 1) -= wr / (h * h);
    M(i, i) = std::exp(W(x)) * ((neumann_right && i == m - 1) ? 0.5 : 1.0);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()), M);
  return es.eigenvalues()(0);
}

}  // namespace oracle
