#pragma once

#include <array>
#include <cstdint>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstddef>
#include <vector>

#include "omk/keldysh.hpp"
#include "omk/model.hpp"

namespace omk {

enum class HamiltonianKind { resonant, full };

struct LindbladOptions {
  int levels_minus = 12;
  int levels_plus = 12;
  HamiltonianKind hamiltonian = HamiltonianKind::resonant;
  bool include_linear_terms = false;  // A_s c_s + h.c. in full mode
  bool check_truncation = true;       // expected occupancy must stay below levels / 5
  std::size_t max_hilbert_dimension = 400;
};

// N = ceil(5 (n + 1)).
int recommended_levels(double expected_occupancy);

// Occupancy the truncation must accommodate: the larger of the bath occupancy
// and the leading-order resonant value. Infinite past the instability.
double expected_occupancy(const Model& m, Branch b);
std::array<int, 2> predicted_levels(const Model& m);

using SparseC = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor>;

// Two-mode Fock space |n-, n+> with index n- + N- n+. Density operators are
// vectorized column-major, so vec(A rho B) = (B^T kron A) vec(rho).
class LiouvillianModel {
 public:
  LiouvillianModel(const Model& m, const LindbladOptions& opt);

  int levels(Branch b) const { return b == Branch::minus ? nm_ : np_; }
  std::size_t dimension() const { return dim_; }
  HamiltonianKind hamiltonian_kind() const { return opt_.hamiltonian; }
  const LindbladOptions& options() const { return opt_; }
  const Model& model() const { return model_; }

  const SparseC& annihilator(Branch b) const { return b == Branch::minus ? cm_ : cp_; }
  const SparseC& hamiltonian() const { return h_; }
  const SparseC& superoperator() const { return l_; }

  // Charge n- + 2 n+ is conserved by the resonant Hamiltonian and by the
  // dissipator, so the superoperator is block diagonal in q(ket) - q(bra).
  bool has_charge_sectors() const { return opt_.hamiltonian == HamiltonianKind::resonant; }
  int charge(std::size_t state) const;
  std::vector<std::size_t> sector(int difference) const;  // vec indices
  SparseC sector_block(const std::vector<std::size_t>& indices) const;

  Eigen::VectorXcd apply(const Eigen::MatrixXcd& rho) const;  // vec(L rho)

 private:
  Model model_;
  LindbladOptions opt_;
  int nm_, np_;
  std::size_t dim_;
  SparseC cm_, cp_, h_, l_;
};

LiouvillianModel build_liouvillian(const Model& m, const LindbladOptions& opt = {});

struct SteadyState {
  Eigen::MatrixXcd density;
  double residual = 0.0;        // |L rho|_max / |L|_max
  double tail_mass = 0.0;       // population in the top two Fock layers of either mode
  bool tail_flag = false;       // tail mass above 1e-6
  double min_eigenvalue = 0.0;
  double trace = 0.0;

  double occupancy(const LiouvillianModel& L, Branch b) const;
  std::complex<double> expectation(const SparseC& op) const;
};

SteadyState steady_state(const LiouvillianModel& L);

struct RegressionOptions {
  bool check_reality = false;  // also solve the t < 0 branch and report Im residual
};

struct RegressionSpectrum {
  std::vector<double> frequency;
  std::vector<double> emission;
  std::vector<double> imaginary_residual;  // |Im S| / |S| when check_reality is set
  std::vector<std::uint8_t> failed;
};

// S_d(w) = 2 Re Tr[d (-(L + i w))^{-1} (rho d^dag)].
RegressionSpectrum regression_spectrum(const LiouvillianModel& L, const SteadyState& ss,
                                       const std::vector<double>& frequencies, const RegressionOptions& opt = {});

}  // namespace omk
