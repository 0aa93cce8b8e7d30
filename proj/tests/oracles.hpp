// Brute-force reference computations used by the tests. These deliberately
// re-derive everything from the model definitions instead of calling the
// library paths they check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Two-site model: optimal-phase energy on the occupation-difference axis.
// E(s) = eps1 n1 + eps2 n2 - t sqrt(1 - s^2) - U (1 + s^2)/2,
// n1 = (1+s)/2, n2 = (1-s)/2, with Re(z1* z2) resolved to -sqrt(n1 n2).

struct DimerModel {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double t = 0.0;
  double u = 0.0;
};

inline double energy_curve(const DimerModel& m, double s) {
  const double n1 = 0.5 * (1.0 + s);
  const double n2 = 0.5 * (1.0 - s);
  return m.eps1 * n1 + m.eps2 * n2 - m.t * std::sqrt((1.0 - s) * (1.0 + s)) -
         m.u * 0.5 * (1.0 + s * s);
}

// E(s) - E(0) in a cancellation-free form, so flat minima near s = 0 keep a
// definite sign down to machine precision:
//   E(s) - E(0) = (eps1 - eps2) s / 2 + s^2 [t / (1 + sqrt(1-s^2)) - U/2].
inline double energy_curve_shifted(const DimerModel& m, double s) {
  const double root = std::sqrt((1.0 - s) * (1.0 + s));
  return 0.5 * (m.eps1 - m.eps2) * s +
         s * s * (m.t / (1.0 + root) - 0.5 * m.u);
}

// Dense grid scan plus golden-section refinement of the bracketing cell.
inline double ground_state_s(const DimerModel& m, int grid_points = 100001) {
  const int n = grid_points;
  auto s_at = [n](int i) {
    return static_cast<double>(2 * i - (n - 1)) / static_cast<double>(n - 1);
  };
  int best = 0;
  double best_e = energy_curve_shifted(m, s_at(0));
  for (int i = 1; i < n; ++i) {
    const double e = energy_curve_shifted(m, s_at(i));
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  double lo = s_at(std::max(0, best - 1));
  double hi = s_at(std::min(n - 1, best + 1));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = energy_curve_shifted(m, x1);
  double f2 = energy_curve_shifted(m, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = energy_curve_shifted(m, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = energy_curve_shifted(m, x2);
    }
  }
  return 0.5 * (lo + hi);
}

inline double ground_state_asymmetry(const DimerModel& m) {
  return std::abs(ground_state_s(m));
}

// Does E(s) have a local minimum on the requested side? 1e5-point scan,
// boundaries included.
inline bool metastable_side_minimum(const DimerModel& m, double eps2,
                                    bool positive_side,
                                    int grid_points = 100001) {
  DimerModel model = m;
  model.eps2 = eps2;
  const int n = grid_points;
  auto s_at = [n](int i) {
    return static_cast<double>(2 * i - (n - 1)) / static_cast<double>(n - 1);
  };
  std::vector<double> e(3);
  e[0] = energy_curve(model, s_at(0));
  e[1] = energy_curve(model, s_at(1));
  if (!positive_side && e[0] < e[1]) return true;
  double prev2 = e[0], prev1 = e[1];
  for (int i = 2; i < n; ++i) {
    const double cur = energy_curve(model, s_at(i));
    const double s_mid = s_at(i - 1);
    if (prev1 < prev2 && prev1 <= cur &&
        (positive_side ? s_mid > 0.0 : s_mid < 0.0))
      return true;
    prev2 = prev1;
    prev1 = cur;
  }
  if (positive_side &&
      energy_curve(model, 1.0) < energy_curve(model, s_at(n - 2)))
    return true;
  return false;
}

// eps2 values where the donor-side (forward) and acceptor-side (backward)
// minima disappear, located by bisection over the scan indicator.
inline std::pair<double, double> spinodal(const DimerModel& m,
                                          double tol = 1e-6) {
  if (m.u <= 0.0 || m.t >= m.u) return {m.eps1, m.eps1};
  const double span = 2.0 * m.u + m.t + 1.0;
  double lo = m.eps1 - span, hi = m.eps1;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (metastable_side_minimum(m, mid, true))
      hi = mid;
    else
      lo = mid;
  }
  const double forward = 0.5 * (lo + hi);
  lo = m.eps1;
  hi = m.eps1 + span;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (metastable_side_minimum(m, mid, false))
      lo = mid;
    else
      hi = mid;
  }
  const double backward = 0.5 * (lo + hi);
  return {forward, backward};
}

// ---------------------------------------------------------------------------
// Linear box (beta = 0): finite-difference diagonalization on interior
// points with Dirichlet walls. Potential V(x) = -2 v0 x / a.

struct FdGround {
  double energy;
  double x_over_a;
};

inline FdGround fd_box_ground(double gamma, double v0, double a,
                              int interior_points = 800) {
  const int n = interior_points;
  const double h = a / (n + 1);
  const double kin = -gamma;  // |gamma|
  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * a + (i + 1) * h;
    hmat(i, i) = 2.0 * kin / (h * h) + (-2.0 * v0 * x / a);
    if (i + 1 < n) {
      hmat(i, i + 1) = -kin / (h * h);
      hmat(i + 1, i) = -kin / (h * h);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hmat);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fd oracle: diagonalization failed");
  const Eigen::VectorXd psi = solver.eigenvectors().col(0);
  double norm = 0.0, xbar = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * a + (i + 1) * h;
    norm += psi(i) * psi(i) * h;
    xbar += x * psi(i) * psi(i) * h;
  }
  return {solver.eigenvalues()(0), xbar / norm / a};
}

// ---------------------------------------------------------------------------
// High-resolution quadrature of <x>/a for a given coefficient vector,
// evaluated straight from the series definition.

inline double quadrature_x_over_a(const std::vector<double>& a_n,
                                  const std::vector<double>& b_n, double a,
                                  int points = 1000001) {
  const double pi = std::numbers::pi;
  double norm_accum = 0.0;
  for (double v : a_n) norm_accum += v * v;
  for (double v : b_n) norm_accum += v * v;
  const double pref2 = (2.0 / a) / norm_accum;
  auto psi = [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < a_n.size(); ++k)
      s += a_n[k] * std::cos(2.0 * pi / a * (k + 0.5) * x);
    for (std::size_t k = 0; k < b_n.size(); ++k)
      s += b_n[k] * std::sin(2.0 * pi / a * (k + 1.0) * x);
    return s;
  };
  const int n = points;
  const double h = a / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * a + i * h;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double f = psi(x);
    acc += w * x * f * f;
  }
  return pref2 * acc * h / a;
}

}  // namespace oracle
