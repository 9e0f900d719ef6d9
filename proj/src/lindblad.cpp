#include "omk/lindblad.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "omk/error.hpp"

namespace omk {

namespace {

using cplx = std::complex<double>;
using Triplets = std::vector<Eigen::Triplet<cplx>>;
constexpr cplx I{0.0, 1.0};

SparseC identity(std::size_t n) {
  SparseC m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setIdentity();
  return m;
}

// Single-mode lowering operator embedded in the two-mode space.
SparseC lowering(int nm, int np, Branch b) {
  const std::size_t dim = static_cast<std::size_t>(nm) * static_cast<std::size_t>(np);
  Triplets t;
  for (int p = 0; p < np; ++p)
    for (int m = 0; m < nm; ++m) {
      const int col = m + nm * p;
      if (b == Branch::minus && m > 0) t.emplace_back(col - 1, col, std::sqrt(static_cast<double>(m)));
      if (b == Branch::plus && p > 0) t.emplace_back(col - nm, col, std::sqrt(static_cast<double>(p)));
    }
  SparseC c(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  c.setFromTriplets(t.begin(), t.end());
  return c;
}

// Appends coeff * (A kron B) to t.
void add_kron(Triplets& t, const SparseC& a, const SparseC& b, cplx coeff) {
  const Eigen::Index nb = b.rows();
  for (Eigen::Index ca = 0; ca < a.outerSize(); ++ca)
    for (SparseC::InnerIterator ia(a, ca); ia; ++ia)
      for (Eigen::Index cb = 0; cb < b.outerSize(); ++cb)
        for (SparseC::InnerIterator ib(b, cb); ib; ++ib)
          t.emplace_back(ia.row() * nb + ib.row(), ia.col() * nb + ib.col(), coeff * ia.value() * ib.value());
}

// Elementary ladder operators with the coefficient of a linear combination.
struct Ladder {
  Branch mode;
  bool dagger;
  double coeff;
};

// Normal-ordered cubic part of g d^dag d (b + b^dag) in polariton operators.
SparseC cubic_hamiltonian(const PolaritonBasis& basis, double g, const SparseC& cm, const SparseC& cp) {
  std::vector<Ladder> d, ddag, x;
  for (Branch s : kBranches) {
    const Polariton& m = basis[s];
    d.push_back({s, false, m.alpha_d});
    d.push_back({s, true, m.alpha_d_bar});
    ddag.push_back({s, true, m.alpha_d});
    ddag.push_back({s, false, m.alpha_d_bar});
    x.push_back({s, false, m.mech_overlap()});
    x.push_back({s, true, m.mech_overlap()});
  }
  const SparseC cmd = SparseC(cm.adjoint()), cpd = SparseC(cp.adjoint());
  auto op = [&](const Ladder& l) -> const SparseC& {
    if (l.mode == Branch::minus) return l.dagger ? cmd : cm;
    return l.dagger ? cpd : cp;
  };
  SparseC h(cm.rows(), cm.cols());
  for (const Ladder& a : ddag)
    for (const Ladder& b : d)
      for (const Ladder& c : x) {
        const double coeff = g * a.coeff * b.coeff * c.coeff;
        if (coeff == 0.0) continue;
        // Creation operators to the left; operators of one kind commute.
        SparseC term = identity(static_cast<std::size_t>(cm.rows()));
        for (const Ladder* l : {&a, &b, &c})
          if (!l->dagger) term = SparseC(op(*l) * term);
        for (const Ladder* l : {&a, &b, &c})
          if (l->dagger) term = SparseC(op(*l) * term);
        h += coeff * term;
      }
  return h;
}

template <class Solver>
bool factor(Solver& s, const SparseC& a) {
  s.compute(a);
  return s.info() == Eigen::Success;
}

}  // namespace

int recommended_levels(double n) {
  if (!(n >= 0.0) || !std::isfinite(n)) return std::numeric_limits<int>::max();
  const double v = std::ceil(5.0 * (n + 1.0) - 1e-12);
  return v > 1e9 ? std::numeric_limits<int>::max() : static_cast<int>(v);
}

double expected_occupancy(const Model& m, Branch b) {
  const double n0 = m.dissipation[b].occupancy;
  if (m.couplings.g_tilde == 0.0) return n0;
  const double lead = leading_peak_occupancy(bare_lines(m), m.couplings.g_tilde, b);
  return std::max(n0, lead);
}

std::array<int, 2> predicted_levels(const Model& m) {
  return {recommended_levels(expected_occupancy(m, Branch::minus)),
          recommended_levels(expected_occupancy(m, Branch::plus))};
}

LiouvillianModel::LiouvillianModel(const Model& m, const LindbladOptions& opt)
    : model_(m), opt_(opt), nm_(opt.levels_minus), np_(opt.levels_plus) {
  if (nm_ < 2 || np_ < 2) fail(ErrorCode::invalid_argument, "build_liouvillian: need at least two levels per mode");
  dim_ = static_cast<std::size_t>(nm_) * static_cast<std::size_t>(np_);
  if (dim_ > opt.max_hilbert_dimension) {
    std::ostringstream os;
    os << "build_liouvillian: Hilbert dimension " << dim_ << " exceeds the cap " << opt.max_hilbert_dimension;
    fail(ErrorCode::memory_budget, os.str());
  }
  if (opt.check_truncation) {
    for (Branch b : kBranches) {
      const double n = expected_occupancy(m, b);
      if (!(n < levels(b) / 5.0)) {
        std::ostringstream os;
        os << "build_liouvillian: expected " << branch_name(b) << " occupancy " << n << " needs more than "
           << levels(b) << " levels (policy: occupancy < levels / 5)";
        fail(ErrorCode::truncation, os.str());
      }
    }
  }
  cm_ = lowering(nm_, np_, Branch::minus);
  cp_ = lowering(nm_, np_, Branch::plus);
  const SparseC cmd = SparseC(cm_.adjoint()), cpd = SparseC(cp_.adjoint());

  h_ = m.basis[Branch::minus].energy * SparseC(cmd * cm_) + m.basis[Branch::plus].energy * SparseC(cpd * cp_);
  if (opt.hamiltonian == HamiltonianKind::resonant) {
    const SparseC v = SparseC(cpd * SparseC(cm_ * cm_));
    h_ += m.couplings.g_tilde * SparseC(v + SparseC(v.adjoint()));
  } else {
    h_ += cubic_hamiltonian(m.basis, m.params.single_photon_coupling(), cm_, cp_);
    if (opt.include_linear_terms) {
      h_ += m.couplings.a[0] * SparseC(cm_ + cmd);
      h_ += m.couplings.a[1] * SparseC(cp_ + cpd);
    }
  }
  h_.prune([](Eigen::Index, Eigen::Index, const std::complex<double>& v) { return v != 0.0; });

  const SparseC id = identity(dim_);
  const SparseC ht = SparseC(h_.transpose());
  Triplets t;
  add_kron(t, id, h_, -I);
  add_kron(t, ht, id, I);
  auto dissipator = [&](const SparseC& c, double rate) {
    if (rate == 0.0) return;
    const SparseC cdc = SparseC(c.adjoint() * c);
    add_kron(t, SparseC(c.conjugate()), c, 2.0 * rate);
    add_kron(t, id, cdc, -rate);
    add_kron(t, SparseC(cdc.transpose()), id, -rate);
  };
  for (Branch b : kBranches) {
    const BranchDissipation& d = m.dissipation[b];
    const SparseC& c = annihilator(b);
    dissipator(c, 0.5 * d.kappa * (d.occupancy + 1.0));
    dissipator(SparseC(c.adjoint()), 0.5 * d.kappa * d.occupancy);
  }
  const auto n2 = static_cast<Eigen::Index>(dim_ * dim_);
  for (Eigen::Index i = 0; i < n2; ++i) t.emplace_back(i, i, cplx{});
  l_.resize(n2, n2);
  l_.setFromTriplets(t.begin(), t.end());
}

int LiouvillianModel::charge(std::size_t state) const {
  const int m = static_cast<int>(state % static_cast<std::size_t>(nm_));
  const int p = static_cast<int>(state / static_cast<std::size_t>(nm_));
  return m + 2 * p;
}

std::vector<std::size_t> LiouvillianModel::sector(int difference) const {
  std::vector<std::size_t> out;
  for (std::size_t col = 0; col < dim_; ++col)
    for (std::size_t row = 0; row < dim_; ++row)
      if (!has_charge_sectors() || charge(row) - charge(col) == difference) out.push_back(row + dim_ * col);
  return out;
}

SparseC LiouvillianModel::sector_block(const std::vector<std::size_t>& indices) const {
  std::vector<Eigen::Index> local(dim_ * dim_, -1);
  for (std::size_t i = 0; i < indices.size(); ++i) local[indices[i]] = static_cast<Eigen::Index>(i);
  Triplets t;
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (SparseC::InnerIterator it(l_, static_cast<Eigen::Index>(indices[i])); it; ++it) {
      const Eigen::Index r = local[static_cast<std::size_t>(it.row())];
      if (r >= 0) t.emplace_back(r, static_cast<Eigen::Index>(i), it.value());
    }
  const auto n = static_cast<Eigen::Index>(indices.size());
  SparseC b(n, n);
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

Eigen::VectorXcd LiouvillianModel::apply(const Eigen::MatrixXcd& rho) const {
  const Eigen::Map<const Eigen::VectorXcd> v(rho.data(), rho.size());
  return l_ * v;
}

LiouvillianModel build_liouvillian(const Model& m, const LindbladOptions& opt) { return LiouvillianModel(m, opt); }

double SteadyState::occupancy(const LiouvillianModel& L, Branch b) const {
  const SparseC& c = L.annihilator(b);
  return expectation(SparseC(c.adjoint() * c)).real();
}

cplx SteadyState::expectation(const SparseC& op) const {
  return (op * density).trace();
}

SteadyState steady_state(const LiouvillianModel& L) {
  const std::size_t dim = L.dimension();
  const std::vector<std::size_t> idx = L.sector(0);
  const SparseC a = L.has_charge_sectors() ? L.sector_block(idx) : L.superoperator();
  const auto n = a.rows();
  double scale = 0.0;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseC::InnerIterator it(a, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  // Shifted inverse iteration towards the zero eigenvalue.
  const double shift = -1e-13 * scale;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i] % (dim + 1) == 0) x[static_cast<Eigen::Index>(i)] = 1.0 / static_cast<double>(dim);
  const int sweeps = 3;
  if (n <= 4096) {
    Eigen::MatrixXcd dense = Eigen::MatrixXcd(a);
    dense.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense);
    for (int s = 0; s < sweeps; ++s) {
      x = lu.solve(x);
      x /= x.norm();
    }
  } else {
    SparseC shifted = a;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
    Eigen::SparseLU<SparseC> lu;
    if (!factor(lu, shifted)) fail(ErrorCode::convergence, "steady_state: sparse factorization failed");
    for (int s = 0; s < sweeps; ++s) {
      x = lu.solve(x);
      if (lu.info() != Eigen::Success) fail(ErrorCode::convergence, "steady_state: sparse solve failed");
      x /= x.norm();
    }
  }
  if (!x.allFinite()) fail(ErrorCode::convergence, "steady_state: non-finite null vector");

  SteadyState ss;
  ss.density = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const std::size_t v = idx[i];
    ss.density(static_cast<Eigen::Index>(v % dim), static_cast<Eigen::Index>(v / dim)) = x[static_cast<Eigen::Index>(i)];
  }
  const cplx tr = ss.density.trace();
  if (std::abs(tr) < 1e-300) fail(ErrorCode::convergence, "steady_state: null vector has zero trace");
  ss.density /= tr;
  ss.trace = ss.density.trace().real();

  double lscale = 0.0;
  const SparseC& full = L.superoperator();
  for (Eigen::Index k = 0; k < full.outerSize(); ++k)
    for (SparseC::InnerIterator it(full, k); it; ++it) lscale = std::max(lscale, std::abs(it.value()));
  ss.residual = L.apply(ss.density).cwiseAbs().maxCoeff() / lscale;

  const Eigen::MatrixXcd herm = 0.5 * (ss.density + ss.density.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  ss.min_eigenvalue = es.eigenvalues().minCoeff();

  const int nm = L.levels(Branch::minus), np = L.levels(Branch::plus);
  for (int p = 0; p < np; ++p)
    for (int m = 0; m < nm; ++m)
      if (m >= nm - 2 || p >= np - 2) ss.tail_mass += ss.density(m + nm * p, m + nm * p).real();
  ss.tail_flag = ss.tail_mass > 1e-6;
  return ss;
}

namespace {

struct Channel {
  std::vector<std::size_t> indices;
  SparseC block;
  Eigen::VectorXcd source;
  Eigen::VectorXcd observable;  // Tr[O X] = observable . x
};

Eigen::VectorXcd restrict_vec(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& idx) {
  const auto dim = static_cast<std::size_t>(m.rows());
  Eigen::VectorXcd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = m(static_cast<Eigen::Index>(idx[i] % dim), static_cast<Eigen::Index>(idx[i] / dim));
  return v;
}

// One regression branch: sum over channels of Tr[O_k (sign L + i w)^{-1} (-src_k)].
std::vector<Channel> make_channels(const LiouvillianModel& L, const Eigen::MatrixXcd& rho, bool forward) {
  const PolaritonBasis& basis = L.model().basis;
  std::vector<Channel> out;
  // Each entry: charge sector, source operator, observable operator.
  struct Piece {
    int sector;
    Eigen::MatrixXcd src, obs;
  };
  std::vector<Piece> pieces;
  for (Branch b : kBranches) {
    const Eigen::MatrixXcd c = Eigen::MatrixXcd(L.annihilator(b));
    const Eigen::MatrixXcd cd = c.adjoint();
    const int q = b == Branch::minus ? 1 : 2;
    const double a = basis[b].alpha_d, ab = basis[b].alpha_d_bar;
    if (forward) {
      // rho d^dag = sum a rho c^dag + ab rho c; observable d = sum a c + ab c^dag.
      pieces.push_back({q, a * rho * cd, a * c});
      pieces.push_back({-q, ab * rho * c, ab * cd});
    } else {
      // d rho = sum a c rho + ab c^dag rho; observable d^dag.
      pieces.push_back({-q, a * c * rho, a * cd});
      pieces.push_back({q, ab * cd * rho, ab * c});
    }
  }
  if (!L.has_charge_sectors()) {
    Channel ch;
    ch.indices = L.sector(0);
    ch.block = L.superoperator();
    const auto dim = static_cast<Eigen::Index>(L.dimension());
    Eigen::MatrixXcd src = Eigen::MatrixXcd::Zero(dim, dim), obs = Eigen::MatrixXcd::Zero(dim, dim);
    for (const Piece& p : pieces) {
      src += p.src;
      obs += p.obs;
    }
    ch.source = restrict_vec(src, ch.indices);
    ch.observable = restrict_vec(obs.transpose(), ch.indices);
    out.push_back(std::move(ch));
    return out;
  }
  for (const Piece& p : pieces) {
    if (p.src.cwiseAbs().maxCoeff() == 0.0) continue;
    Channel ch;
    ch.indices = L.sector(p.sector);
    ch.block = L.sector_block(ch.indices);
    ch.source = restrict_vec(p.src, ch.indices);
    ch.observable = restrict_vec(p.obs.transpose(), ch.indices);
    out.push_back(std::move(ch));
  }
  return out;
}

// Returns sum_k obs_k . x_k with (sign * L_k + i w) x_k = -src_k.
bool regression_branch(std::vector<Channel>& chans, double sign, double w, cplx& out) {
  out = 0.0;
  for (Channel& ch : chans) {
    SparseC a = sign * ch.block;
    for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += I * w;
    Eigen::SparseLU<SparseC> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXcd x = lu.solve(Eigen::VectorXcd(-ch.source));
    if (lu.info() != Eigen::Success || !x.allFinite()) return false;
    out += ch.observable.cwiseProduct(x).sum();
  }
  return true;
}

}  // namespace

RegressionSpectrum regression_spectrum(const LiouvillianModel& L, const SteadyState& ss,
                                       const std::vector<double>& frequencies, const RegressionOptions& opt) {
  RegressionSpectrum r;
  r.frequency = frequencies;
  r.emission.assign(frequencies.size(), std::numeric_limits<double>::quiet_NaN());
  r.imaginary_residual.assign(frequencies.size(), 0.0);
  r.failed.assign(frequencies.size(), 0);
  std::vector<Channel> fwd = make_channels(L, ss.density, true);
  std::vector<Channel> bwd;
  if (opt.check_reality) bwd = make_channels(L, ss.density, false);
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double w = frequencies[i];
    cplx zp;
    if (!regression_branch(fwd, 1.0, w, zp)) {
      r.failed[i] = 1;
      continue;
    }
    if (!opt.check_reality) {
      r.emission[i] = 2.0 * zp.real();
      continue;
    }
    // t < 0 branch: Tr[d^dag (-(L - i w))^{-1} (d rho)], solved as (L - i w) x = -src.
    cplx zm;
    if (!regression_branch(bwd, -1.0, w, zm)) {
      r.failed[i] = 1;
      continue;
    }
    zm = -zm;  // (-L + i w) x = -src  gives  (L - i w) x = src
    const cplx s = zp + zm;
    r.emission[i] = s.real();
    r.imaginary_residual[i] = std::abs(s.imag()) / std::max(std::abs(s), 1e-300);
  }
  return r;
}

}  // namespace omk
