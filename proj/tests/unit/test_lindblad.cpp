#include <doctest.h>

#include <cmath>

#include "../oracles/oracles.hpp"
#include "omk/error.hpp"
#include "omk/keldysh.hpp"
#include "omk/lindblad.hpp"
#include "omk/spectrum.hpp"

using namespace omk;

namespace {

Model model_at(double g, double G_over_wm = -1.0, double n_th = 0.0, double gamma = 1e-4) {
  ParamValues v;
  v.mech_freq = 50.0;
  v.detuning = -50.0;
  v.drive_coupling = G_over_wm < 0.0 ? resonant_coupling(-50.0, 50.0) : G_over_wm * 50.0;
  v.single_photon_coupling = g;
  v.mech_bath_occupancy = n_th;
  v.mech_damping = gamma;
  return make_model(SystemParams(v));
}

LindbladOptions levels(int n, HamiltonianKind h = HamiltonianKind::resonant) {
  LindbladOptions o;
  o.levels_minus = o.levels_plus = n;
  o.hamiltonian = h;
  o.check_truncation = false;
  return o;
}

}  // namespace

TEST_CASE("superoperator matches a dense construction at three levels") {
  const Model m = model_at(1.0, -1.0, 0.5);
  const LiouvillianModel L(m, levels(3));
  const Eigen::MatrixXcd cm = oracle::lowering(3, 3, 0), cp = oracle::lowering(3, 3, 1);
  const double g = m.couplings.g_tilde;
  const Eigen::MatrixXcd v = cp.adjoint() * cm * cm;
  const Eigen::MatrixXcd H = m.basis[Branch::minus].energy * cm.adjoint() * cm +
                             m.basis[Branch::plus].energy * cp.adjoint() * cp + g * (v + v.adjoint());
  std::vector<Eigen::MatrixXcd> jumps;
  for (Branch b : kBranches) {
    const auto& d = m.dissipation[b];
    const Eigen::MatrixXcd& c = b == Branch::minus ? cm : cp;
    jumps.push_back(std::sqrt(d.kappa * (d.occupancy + 1.0)) * c);
    jumps.push_back(std::sqrt(d.kappa * d.occupancy) * Eigen::MatrixXcd(c.adjoint()));
  }
  const Eigen::MatrixXcd ref = oracle::dense_liouvillian(H, jumps);
  const Eigen::MatrixXcd got = Eigen::MatrixXcd(L.superoperator());
  REQUIRE(got.rows() == 81);
  CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("trace and Hermiticity are preserved") {
  const Model m = model_at(1.0, -1.0, 0.3);
  for (HamiltonianKind h : {HamiltonianKind::resonant, HamiltonianKind::full}) {
    const LiouvillianModel L(m, levels(4, h));
    const std::size_t n = L.dimension();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    rho = rho * rho.adjoint();
    const Eigen::VectorXcd d = L.apply(rho);
    const Eigen::MatrixXcd drho = Eigen::Map<const Eigen::MatrixXcd>(d.data(), static_cast<Eigen::Index>(n),
                                                                     static_cast<Eigen::Index>(n));
    CHECK(std::abs(drho.trace()) < 1e-10 * drho.cwiseAbs().maxCoeff());
    CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() < 1e-10 * drho.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("charge sectors partition the Liouville space") {
  const LiouvillianModel L(model_at(1.0), levels(4));
  std::size_t total = 0;
  for (int q = -20; q <= 20; ++q) total += L.sector(q).size();
  CHECK(total == L.dimension() * L.dimension());
}

TEST_CASE("steady state matches the dense null vector") {
  const Model m = model_at(1.0, -1.0, 0.2);
  const LiouvillianModel L(m, levels(4));
  const SteadyState ss = steady_state(L);
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(L.superoperator());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense);
  Eigen::Index k = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&k);
  Eigen::VectorXcd v = es.eigenvectors().col(k);
  const auto n = static_cast<Eigen::Index>(L.dimension());
  Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(v.data(), n, n);
  rho /= rho.trace();
  CHECK((rho - ss.density).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(ss.residual < 1e-10);
  CHECK(ss.trace == doctest::Approx(1.0));
  CHECK(ss.min_eigenvalue > -1e-10);
}

TEST_CASE("without interactions the occupancies are the bath values") {
  const Model m = model_at(0.0, 0.2, 0.3);
  const LiouvillianModel L(m, levels(8));
  const SteadyState ss = steady_state(L);
  for (Branch b : kBranches) CHECK(ss.occupancy(L, b) == doctest::Approx(m.dissipation[b].occupancy).epsilon(1e-6));
}

TEST_CASE("regression spectrum reproduces the linear Keldysh spectrum") {
  const Model m = model_at(0.0, 0.2, 0.3);
  const LiouvillianModel L(m, levels(8));
  const SteadyState ss = steady_state(L);
  const GreenFunctionSet G = bare_green(m, plan_windows(m));
  for (Branch b : kBranches) {
    const SpectrumResult S = cavity_spectrum(m.basis, G, m.basis[b].energy, 1.0);
    std::vector<double> w;
    for (std::size_t i = 0; i < S.frequency.size(); i += S.frequency.size() / 8) w.push_back(S.frequency[i]);
    const RegressionSpectrum R = regression_spectrum(L, ss, w);
    for (std::size_t i = 0, k = 0; i < S.frequency.size(); i += S.frequency.size() / 8, ++k)
      CHECK(R.emission[k] == doctest::Approx(S.emission[i]).epsilon(1e-3));
  }
}

TEST_CASE("regression spectrum is real") {
  const Model m = model_at(1.0);
  const LiouvillianModel L(m, levels(6));
  const SteadyState ss = steady_state(L);
  RegressionOptions o;
  o.check_reality = true;
  const std::vector<double> w{m.basis[Branch::minus].energy, m.basis[Branch::plus].energy};
  const RegressionSpectrum R = regression_spectrum(L, ss, w, o);
  for (double r : R.imaginary_residual) CHECK(r < 1e-8);
}

TEST_CASE("resonant and full Hamiltonians agree at weak coupling") {
  const Model m = model_at(0.1);
  const LiouvillianModel Lr(m, levels(5, HamiltonianKind::resonant));
  const LiouvillianModel Lf(m, levels(5, HamiltonianKind::full));
  const SteadyState sr = steady_state(Lr), sf = steady_state(Lf);
  for (Branch b : kBranches) {
    const double nr = sr.occupancy(Lr, b), nf = sf.occupancy(Lf, b);
    CHECK(std::abs(nr - nf) < 0.02 * nr + 1e-6);
  }
}

TEST_CASE("truncation policy and memory cap") {
  const Model hot = model_at(1.0, -1.0, 100.0, 0.1);
  LindbladOptions o = levels(6);
  o.check_truncation = true;
  try {
    LiouvillianModel L(hot, o);
    FAIL("expected a truncation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncation);
  }
  LindbladOptions big = levels(30);
  try {
    LiouvillianModel L(model_at(1.0), big);
    FAIL("expected a memory budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::memory_budget);
  }
  CHECK(recommended_levels(0.0) == 5);
  CHECK(recommended_levels(1.2) == 11);
}
