#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/exact_evolution.hpp"
#include "spinchain/measures.hpp"
#include "spinchain/sphere_grid.hpp"
#include "spinchain/spin_algebra.hpp"
#include "spinchain/state_prep.hpp"

namespace spinchain {

// 2 sqrt(pi) / sqrt(2S+1), the kernel prefactor
inline double kernel_prefactor(SpinSize s) {
  return 2.0 * std::sqrt(std::numbers::pi) / std::sqrt(double(s.dim()));
}

// (2S+1)/(4pi), the measure prefactor
inline double measure_prefactor(SpinSize s) {
  return s.dim() / (4.0 * std::numbers::pi);
}

// Stratonovich-Weyl kernel omega(Omega) = c sum_LM Y*_LM(Omega) T_LM.
inline Matrix kernel_matrix(SpinSize s, double theta, double phi) {
  auto basis = tensor_operator_basis(s);
  Matrix w = Matrix::Zero(s.dim(), s.dim());
  int idx = 0;
  for (int L = 0; L <= s.two_s; ++L)
    for (int M = -L; M <= L; ++M, ++idx)
      w += std::conj(spherical_harmonic(L, M, theta, phi)) * basis[idx];
  return kernel_prefactor(s) * w;
}

struct WignerField {
  SphereGrid grid;
  SpinSize s;
  std::vector<double> values;  // one per grid node

  // (2S+1)/(4pi) integral of the field
  double integral() const {
    double acc = 0;
    for (int i = 0; i < grid.size(); ++i) acc += grid.weight(i) * values[i];
    return measure_prefactor(s) * acc;
  }
};

struct PairWignerField {
  SphereGrid grid1, grid2;
  SpinSize s;
  RealMatrix values;  // (n1 nodes) x (n2 nodes)
};

namespace detail {

// Y*_LM at every node, flat (L,M) index matching tensor_operator_basis.
inline Matrix conj_harmonic_table(SpinSize s, const SphereGrid& grid) {
  const int nlm = s.dim() * s.dim();
  Matrix y(grid.size(), nlm);
  for (int node = 0; node < grid.size(); ++node) {
    double th = grid.theta_at(node), ph = grid.phi_at(node);
    int idx = 0;
    for (int L = 0; L <= s.two_s; ++L)
      for (int M = -L; M <= L; ++M, ++idx)
        y(node, idx) = std::conj(spherical_harmonic(L, M, th, ph));
  }
  return y;
}

inline void require_exact(SpinSize s, const SphereGrid& grid, const char* who) {
  if (!grid.exact_for(s.two_s))
    throw ResolutionError(std::string(who) +
                          ": grid under-resolved (need n_theta >= 2S+1, n_phi >= 4S+1)");
}

}  // namespace detail

// Tensor-operator coefficients a_LM = Tr(A T_LM), flat (L,M) order.
inline Vector tensor_coefficients(const Matrix& a, SpinSize s) {
  auto basis = tensor_operator_basis(s);
  Vector coef(basis.size());
  for (size_t i = 0; i < basis.size(); ++i)
    coef(i) = (a * basis[i]).trace();
  return coef;
}

// W_A(Omega) = Tr(A omega(Omega)) sampled on the grid. Imaginary parts are
// discarded; they vanish for Hermitian input.
inline WignerField wigner_of_operator(const Matrix& a, SpinSize s,
                                      const SphereGrid& grid) {
  if (a.rows() != s.dim())
    throw std::domain_error("wigner_of_operator: dimension mismatch");
  Vector coef = tensor_coefficients(a, s);
  Matrix y = detail::conj_harmonic_table(s, grid);
  Vector w = kernel_prefactor(s) * (y * coef);
  WignerField f{grid, s, std::vector<double>(grid.size())};
  for (int i = 0; i < grid.size(); ++i) f.values[i] = w(i).real();
  return f;
}

// Inverse map rho = (2S+1)/(4pi) sum_i w_i W_i omega(Omega_i), done in the
// tensor-operator basis.
inline Matrix reconstruct_operator(const WignerField& f) {
  const SpinSize s = f.s;
  detail::require_exact(s, f.grid, "reconstruct_operator");
  Matrix y = detail::conj_harmonic_table(s, f.grid);
  Vector proj = Vector::Zero(y.cols());
  for (int i = 0; i < f.grid.size(); ++i)
    proj += f.grid.weight(i) * f.values[i] * y.row(i).transpose();
  proj *= measure_prefactor(s) * kernel_prefactor(s);
  auto basis = tensor_operator_basis(s);
  Matrix rho = Matrix::Zero(s.dim(), s.dim());
  for (size_t k = 0; k < basis.size(); ++k) rho += proj(k) * basis[k];
  return rho;
}

// Two-site symbol W(Omega1, Omega2) = Tr(A omega x omega).
inline PairWignerField wigner_of_pair_operator(const Matrix& a, SpinSize s,
                                               const SphereGrid& g1,
                                               const SphereGrid& g2) {
  const int d = s.dim();
  if (a.rows() != d * d)
    throw std::domain_error("wigner_of_pair_operator: dimension mismatch");
  auto basis = tensor_operator_basis(s);
  const int nlm = d * d;
  // b_pq = Tr(A (T_p x T_q))
  Matrix b(nlm, nlm);
  for (int p = 0; p < nlm; ++p)
    for (int q = 0; q < nlm; ++q) {
      Complex acc = 0;
      for (int aa = 0; aa < d; ++aa)
        for (int bb = 0; bb < d; ++bb) {
          if (basis[p](bb, aa) == 0.0) continue;
          for (int cc = 0; cc < d; ++cc)
            for (int ee = 0; ee < d; ++ee)
              acc += a(aa * d + cc, bb * d + ee) * basis[p](bb, aa) *
                     basis[q](ee, cc);
        }
      b(p, q) = acc;
    }
  Matrix y1 = detail::conj_harmonic_table(s, g1);
  Matrix y2 = detail::conj_harmonic_table(s, g2);
  double c = kernel_prefactor(s);
  Matrix w = (c * c) * (y1 * b * y2.transpose());
  PairWignerField f{g1, g2, s, w.real()};
  return f;
}

// Inverse two-site map, via per-node partial kernels.
inline Matrix reconstruct_pair_operator(const PairWignerField& f) {
  const SpinSize s = f.s;
  detail::require_exact(s, f.grid1, "reconstruct_pair_operator");
  detail::require_exact(s, f.grid2, "reconstruct_pair_operator");
  const int d = s.dim();
  const int n1 = f.grid1.size(), n2 = f.grid2.size();
  Matrix y1 = detail::conj_harmonic_table(s, f.grid1);
  Matrix y2 = detail::conj_harmonic_table(s, f.grid2);
  // project both spheres onto tensor coefficients, then assemble
  const int nlm = d * d;
  Matrix proj(nlm, nlm);  // quadrature of W against Y*_p(1) Y*_q(2)
  {
    Matrix wy2(n1, nlm);
    Eigen::VectorXd w2(n2);
    for (int j = 0; j < n2; ++j) w2(j) = f.grid2.weight(j);
    wy2 = f.values * (w2.asDiagonal() * y2);
    Eigen::VectorXd w1(n1);
    for (int i = 0; i < n1; ++i) w1(i) = f.grid1.weight(i);
    proj = y1.transpose() * (w1.asDiagonal() * wy2);
  }
  double mc = measure_prefactor(s) * kernel_prefactor(s);
  proj *= mc * mc;
  auto basis = tensor_operator_basis(s);
  Matrix rho = Matrix::Zero(d * d, d * d);
  for (int p = 0; p < nlm; ++p)
    for (int q = 0; q < nlm; ++q) {
      if (std::abs(proj(p, q)) < 1e-300) continue;
      // kron(T_p, T_q), exploiting one-diagonal sparsity of T
      for (int aa = 0; aa < d; ++aa)
        for (int bb = 0; bb < d; ++bb) {
          Complex tp = basis[p](aa, bb);
          if (tp == 0.0) continue;
          for (int cc = 0; cc < d; ++cc)
            for (int ee = 0; ee < d; ++ee) {
              Complex tq = basis[q](cc, ee);
              if (tq == 0.0) continue;
              rho(aa * d + cc, bb * d + ee) += proj(p, q) * tp * tq;
            }
        }
    }
  return rho;
}

// Stratonovich-Weyl overlap: Tr(AB) from two sampled symbols.
inline double overlap_trace(const WignerField& fa, const WignerField& fb) {
  double acc = 0;
  for (int i = 0; i < fa.grid.size(); ++i)
    acc += fa.grid.weight(i) * fa.values[i] * fb.values[i];
  return measure_prefactor(fa.s) * acc;
}

// ---------------------------------------------------------------------------
// Approximate initial-state symbol (large-S asymptotic form)

class InitialWignerApprox {
public:
  InitialWignerApprox(SpinSize s, const PreparationParams& p)
      : s_(s), params_(p), dengine_(s), gamma_(coherent_equator(s).amplitudes) {}

  double operator()(double theta, double phi) const {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cv = std::cos(params_.theta_rot), sv = std::sin(params_.theta_rot);
    double cos_big = std::clamp(ct * cv + st * std::sin(phi) * sv, -1.0, 1.0);
    double big_theta = std::acos(cos_big);
    // X = cos(Phi) sin(Theta), Y = sin(Phi) sin(Theta); Phi is irrelevant at
    // the poles of the rotated frame where d(2 Theta) collapses.
    double x = st * std::cos(phi);
    double y = st * std::sin(phi) * cv - ct * sv;
    double big_phi = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);

    RealMatrix dmat = dengine_.matrix(2.0 * big_theta);
    const int d = s_.dim();
    Complex acc = 0;
    for (int in = 0; in < d; ++in) {
      double n = s_.m_of(in);
      for (int ik = 0; ik < d; ++ik) {
        double k = s_.m_of(ik);
        double arg = -params_.mu * (k * k - n * n) - (n - k) * big_phi +
                     0.5 * std::numbers::pi * (n + k + s_.two_s);
        acc += gamma_(ik).real() * gamma_(in).real() * std::exp(Complex(0, arg)) *
               dmat(in, ik);
      }
    }
    return acc.real();
  }

  WignerField field(const SphereGrid& grid) const {
    WignerField f{grid, s_, std::vector<double>(grid.size())};
    for (int i = 0; i < grid.size(); ++i)
      f.values[i] = (*this)(grid.theta_at(i), grid.phi_at(i));
    return f;
  }

private:
  SpinSize s_;
  PreparationParams params_;
  WignerDEngine dengine_;
  Vector gamma_;
};

inline double wigner_initial_approx(SpinSize s, const PreparationParams& p,
                                    double theta, double phi) {
  return InitialWignerApprox(s, p)(theta, phi);
}

// ---------------------------------------------------------------------------
// Classical trajectories

// phi drift per unit neighbor cos(theta). Default is the t/(2 eps) rate of
// the leading-order trajectories; the exact-symbol rate 2 eps S(S+1) t is a
// switch (the two agree to O(1/S)).
struct TrajectoryMap {
  double t;
  SpinSize s;
  bool exact_coefficient = false;

  double tau() const {
    if (exact_coefficient) return 2.0 * s.epsilon() * s.s() * (s.s() + 1.0) * t;
    return 0.5 * t / s.epsilon();
  }
};

// Backward map: theta frozen, each phi_l shifted by -tau * sum of the
// neighbors' cos(theta). config is a per-site (theta, phi) list.
inline std::vector<std::array<double, 2>> backward_trajectory(
    const TrajectoryMap& map, const std::vector<std::array<double, 2>>& config) {
  const int n = static_cast<int>(config.size());
  std::vector<std::array<double, 2>> out = config;
  const double tau = map.tau();
  for (int l = 0; l < n; ++l) {
    double drift = 0;
    if (l > 0) drift += std::cos(config[l - 1][0]);
    if (l + 1 < n) drift += std::cos(config[l + 1][0]);
    out[l][1] = config[l][1] - tau * drift;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evolved marginal fields
//
// Each site's initial symbol is expanded in azimuthal components,
//   W0(theta, phi - delta) = sum_M h_M(theta, phi) e^{i M delta},
// so the phi drift by tau*cos(theta_nb) becomes a phase factor and a traced
// neighbor contributes only the characteristic function of its (conserved)
// theta marginal, F(x) = integral p(u) e^{i x u} du. p(u) is a polynomial of
// degree 2S, so F follows exactly from Legendre coefficients and spherical
// Bessel functions.

class ChainSymbols {
public:
  ChainSymbols(const ChainSpec& chain, const SphereGrid& grid,
               bool exact_drift_coefficient = false)
      : chain_(&chain), grid_(grid), exact_drift_(exact_drift_coefficient) {
    const SpinSize s = chain.s;
    detail::require_exact(s, grid, "ChainSymbols");
    const int d = s.dim();
    const int n_m = 2 * s.two_s + 1;  // M from -2S to 2S
    Matrix y = detail::conj_harmonic_table(s, grid);
    auto basis = tensor_operator_basis(s);
    h_.reserve(chain.n_sites);
    legendre_.reserve(chain.n_sites);
    const double c = kernel_prefactor(s);
    for (int j = 1; j <= chain.n_sites; ++j) {
      Matrix rho = density_of(chain.site(j));
      Vector coef = tensor_coefficients(rho, s);
      // group by M: h(node, M-index), M-index = M + 2S
      Matrix h = Matrix::Zero(grid.size(), n_m);
      int idx = 0;
      for (int L = 0; L <= s.two_s; ++L)
        for (int M = -L; M <= L; ++M, ++idx)
          h.col(M + s.two_s) += c * coef(idx) * y.col(idx);
      h_.push_back(std::move(h));
      // theta-marginal Legendre coefficients: p(u) = sum_L beta_L P_L(u)
      Eigen::VectorXd beta(s.two_s + 1);
      for (int L = 0; L <= s.two_s; ++L) {
        int idx_l0 = L * (L + 1);  // flat index of (L, M=0)
        beta(L) = 0.5 * d * c * coef(idx_l0).real() *
                  std::sqrt((2.0 * L + 1.0) / (4.0 * std::numbers::pi));
      }
      legendre_.push_back(beta);
    }
  }

  const SphereGrid& grid() const { return grid_; }
  SpinSize spin() const { return chain_->s; }

  // characteristic function of site j's theta marginal (1-based site)
  Complex marginal_characteristic(int j, double x) const {
    const auto& beta = legendre_.at(j - 1);
    Complex acc = 0;
    Complex il = 1.0;  // i^L
    for (int L = 0; L < beta.size(); ++L) {
      acc += beta(L) * 2.0 * il * std::sph_bessel(L, std::abs(x));
      il *= Complex(0, 1);
    }
    if (x < 0) acc = std::conj(acc);
    return acc;
  }

  // Legendre coefficients of site j's theta marginal density.
  const Eigen::VectorXd& marginal_coefficients(int j) const {
    return legendre_.at(j - 1);
  }

  double tau(double t) const {
    return TrajectoryMap{t, chain_->s, exact_drift_}.tau();
  }

  WignerField evolved_single(int j, double t) const {
    const SpinSize s = chain_->s;
    const int n_m = 2 * s.two_s + 1;
    const double tv = tau(t);
    Vector fac(n_m);
    for (int mi = 0; mi < n_m; ++mi) {
      int M = mi - s.two_s;
      Complex f = 1;
      if (j > 1) f *= marginal_characteristic(j - 1, M * tv);
      if (j < chain_->n_sites) f *= marginal_characteristic(j + 1, M * tv);
      fac(mi) = f;
    }
    Vector w = h_.at(j - 1) * fac;
    WignerField out{grid_, s, std::vector<double>(grid_.size())};
    for (int i = 0; i < grid_.size(); ++i) out.values[i] = w(i).real();
    return out;
  }

  // Adjacent-pair field; factorizes into two cross-theta tables.
  PairWignerField evolved_pair(int j, double t) const {
    if (j < 1 || j + 1 > chain_->n_sites)
      throw std::domain_error("evolved_pair: pair (j, j+1) out of range");
    const SpinSize s = chain_->s;
    const int n_m = 2 * s.two_s + 1;
    const double tv = tau(t);
    const int n = grid_.size();
    const int nt = grid_.n_theta;

    // a(node1, theta-row of sphere 2) and b(node2, theta-row of sphere 1)
    auto cross_table = [&](int site, int outer_nb) {
      Matrix phase(n_m, nt);
      for (int mi = 0; mi < n_m; ++mi) {
        int M = mi - s.two_s;
        Complex f = 1;
        if (outer_nb >= 1 && outer_nb <= chain_->n_sites)
          f = marginal_characteristic(outer_nb, M * tv);
        for (int it = 0; it < nt; ++it)
          phase(mi, it) = f * std::exp(Complex(0, M * tv * grid_.u[it]));
      }
      return Matrix(h_.at(site - 1) * phase);  // n x nt
    };
    Matrix a = cross_table(j, j - 1);
    Matrix b = cross_table(j + 1, j + 2);

    PairWignerField out{grid_, grid_, s, RealMatrix(n, n)};
    for (int i1 = 0; i1 < n; ++i1) {
      int it1 = i1 / grid_.n_phi;
      for (int i2 = 0; i2 < n; ++i2) {
        int it2 = i2 / grid_.n_phi;
        out.values(i1, i2) = a(i1, it2).real() * b(i2, it1).real();
      }
    }
    return out;
  }

private:
  const ChainSpec* chain_;
  SphereGrid grid_;
  bool exact_drift_;
  std::vector<Matrix> h_;                  // per site: nodes x (4S+1)
  std::vector<Eigen::VectorXd> legendre_;  // per site: 2S+1 coefficients
};

inline WignerField evolved_single_wigner(const ChainSpec& chain, int j, double t,
                                         const SphereGrid& grid,
                                         bool exact_drift = false) {
  return ChainSymbols(chain, grid, exact_drift).evolved_single(j, t);
}

inline PairWignerField evolved_pair_wigner(const ChainSpec& chain, int j, double t,
                                           const SphereGrid& grid,
                                           bool exact_drift = false) {
  return ChainSymbols(chain, grid, exact_drift).evolved_pair(j, t);
}

// Single-site marginal of a pair field (integrates out sphere 2 or 1).
inline WignerField pair_marginal(const PairWignerField& f, int which) {
  const auto& gkeep = (which == 1) ? f.grid1 : f.grid2;
  const auto& gout = (which == 1) ? f.grid2 : f.grid1;
  WignerField out{gkeep, f.s, std::vector<double>(gkeep.size(), 0.0)};
  double mp = measure_prefactor(f.s);
  for (int i = 0; i < gkeep.size(); ++i) {
    double acc = 0;
    for (int jn = 0; jn < gout.size(); ++jn)
      acc += gout.weight(jn) * ((which == 1) ? f.values(i, jn) : f.values(jn, i));
    out.values[i] = mp * acc;
  }
  return out;
}

// P = (2S+1)/(4pi) integral W^2
inline double semiclassical_purity(const WignerField& f) {
  double acc = 0;
  for (int i = 0; i < f.grid.size(); ++i)
    acc += f.grid.weight(i) * f.values[i] * f.values[i];
  return measure_prefactor(f.s) * acc;
}

// Raw negativity of the operator reconstructed from a pair field. The
// reconstruction is Hermitized and trace-renormalized first: a semiclassical
// field need not map back to an exact density matrix.
inline double semiclassical_negativity_full(const PairWignerField& f) {
  Matrix rho = hermitized(reconstruct_pair_operator(f));
  double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw std::domain_error("semiclassical_negativity_full: zero-trace field");
  rho /= tr;
  return negativity_raw(rho, f.s);
}

// Absolute-symbol approximation: integral of |W| of the partially
// transposed operator, with the ((2S+1)/4pi)^2 measure so that a positive
// symbol gives exactly zero, minus 1.
inline double semiclassical_negativity_approx(const Matrix& rho_pair, SpinSize s,
                                              const SphereGrid& g1,
                                              const SphereGrid& g2) {
  Matrix pt = partial_transpose(rho_pair, Transposed::first, s);
  PairWignerField w = wigner_of_pair_operator(pt, s, g1, g2);
  double acc = 0;
  for (int i = 0; i < g1.size(); ++i)
    for (int j = 0; j < g2.size(); ++j)
      acc += g1.weight(i) * g2.weight(j) * std::abs(w.values(i, j));
  double mp = measure_prefactor(s);
  return mp * mp * acc - 1.0;
}

inline double semiclassical_negativity_approx(const PairWignerField& f) {
  Matrix rho = hermitized(reconstruct_pair_operator(f));
  double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw std::domain_error("semiclassical_negativity_approx: zero-trace field");
  rho /= tr;
  return semiclassical_negativity_approx(rho, f.s, f.grid1, f.grid2);
}

}  // namespace spinchain
