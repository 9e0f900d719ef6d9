#pragma once
// Reference computations that share no code with the library.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

struct Mode {
  double energy;
  // c = a_d d + a_b b + abar_d d^dag + abar_b b^dag, symplectic norm 1.
  // In the inverse expansion d = sum (alpha c + alpha_bar c^dag) this gives alpha_bar = -abar.
  double a_d, a_b, abar_d, abar_b;
};

// Normal modes of -Delta d^dag d + wM b^dag b + G (d + d^dag)(b + b^dag) from the
// 4x4 dynamical matrix i dv/dt = D v, v = (d, b, d^dag, b^dag). Row vectors x with
// x D = E x give [c, H] = E c. Sorted by energy.
inline std::array<Mode, 2> symplectic_modes(double delta, double wm, double G) {
  Eigen::Matrix4d D;
  D << -delta, G, 0, G,
       G, wm, G, 0,
       0, -G, delta, -G,
       -G, 0, -G, -wm;
  Eigen::EigenSolver<Eigen::Matrix4d> es(D.transpose());
  std::vector<Mode> modes;
  for (int i = 0; i < 4; ++i) {
    const double E = es.eigenvalues()[i].real();
    if (E <= 0.0) continue;
    Eigen::Vector4d x = es.eigenvectors().col(i).real();
    const double norm = x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
    x /= std::sqrt(norm);
    if (x[0] < 0.0) x = -x;
    modes.push_back({E, x[0], x[1], x[2], x[3]});
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.energy < b.energy; });
  return {modes[0], modes[1]};
}

// RK4 integration of the modulated cavity, a' = (i Delta - kappa/2 + i eps wM sin(wM t)) a + i.
inline cplx modulated_cavity(double delta, double wm, double kappa, double eps, double t_end, int steps) {
  const cplx I{0.0, 1.0};
  auto f = [&](double t, cplx a) { return (I * delta - 0.5 * kappa + I * eps * wm * std::sin(wm * t)) * a + I; };
  cplx a = 0.0;
  const double h = t_end / steps;
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const cplx k1 = f(t, a), k2 = f(t + h / 2, a + h / 2 * k1), k3 = f(t + h / 2, a + h / 2 * k2),
               k4 = f(t + h, a + h * k3);
    a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return a;
}

// Principal-value Hilbert transform on a uniform grid: Re f(w_i) = (1/pi) P sum Im f(w_j) h / (w_j - w_i).
inline std::vector<double> kramers_kronig(const std::vector<double>& im, double h) {
  const std::size_t n = im.size();
  std::vector<double> re(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    // Odd-even rule: pair points an odd number of steps away.
    for (std::size_t j = (i + 1) % 2; j < n; j += 2) acc += im[j] / (static_cast<double>(j) - static_cast<double>(i));
    re[i] = 2.0 * acc / M_PI;
  }
  (void)h;
  return re;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Dense Lindblad generator of vec(rho) (column-major), rho' = -i[H, rho] + sum_k D[L_k] rho.
inline Eigen::MatrixXcd dense_liouvillian(const Eigen::MatrixXcd& H, const std::vector<Eigen::MatrixXcd>& jumps) {
  const Eigen::Index n = H.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const cplx I{0.0, 1.0};
  Eigen::MatrixXcd L = -I * kron(id, H) + I * kron(H.transpose(), id);
  for (const auto& c : jumps) {
    const Eigen::MatrixXcd cdc = c.adjoint() * c;
    L += kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
  }
  return L;
}

// Annihilator of mode `which` (0 or 1) on the product space, index n0 + N0 n1.
inline Eigen::MatrixXcd lowering(int n0, int n1, int which) {
  const int dim = n0 * n1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n0; ++i0) {
      const int from = i0 + n0 * i1;
      if (which == 0 && i0 > 0) a(from - 1, from) = std::sqrt(static_cast<double>(i0));
      if (which == 1 && i1 > 0) a(from - n0, from) = std::sqrt(static_cast<double>(i1));
    }
  return a;
}

inline double lorentzian_flux(double occupancy, double weight, double width, double half_band) {
  return weight * occupancy * (2.0 / M_PI) * std::atan(half_band / (0.5 * width));
}

}  // namespace oracle
