#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spinchain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

// Spin size S stored as the integer 2S. Basis order is descending
// m = S, S-1, ..., -S everywhere in this library.
struct SpinSize {
  int two_s;

  explicit SpinSize(int two_s_) : two_s(two_s_) {
    if (two_s < 1) throw std::invalid_argument("SpinSize: two_s must be >= 1");
  }

  double s() const { return 0.5 * two_s; }
  int dim() const { return two_s + 1; }
  double epsilon() const { return 1.0 / (two_s + 1); }

  // m value of basis index i (i = 0 is m = +S).
  double m_of(int i) const { return 0.5 * two_s - i; }
  // basis index of m value (must be one of the allowed half-integers)
  int index_of(double m) const {
    double di = 0.5 * two_s - m;
    int i = static_cast<int>(std::lround(di));
    if (std::abs(di - i) > 1e-9 || i < 0 || i > two_s)
      throw std::domain_error("SpinSize: m out of range");
    return i;
  }
};

struct SpinOperators {
  Matrix sx, sy, sz;
};

// S_x, S_y, S_z in the descending S_z eigenbasis.
inline SpinOperators spin_operators(SpinSize s) {
  const int d = s.dim();
  const double S = s.s();
  Matrix sp = Matrix::Zero(d, d);  // ladder S_+
  Matrix sz = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double m = s.m_of(i);
    sz(i, i) = m;
    if (i > 0) sp(i - 1, i) = std::sqrt(S * (S + 1) - m * (m + 1));
  }
  Matrix sm = sp.adjoint();
  SpinOperators ops;
  ops.sx = 0.5 * (sp + sm);
  ops.sy = Complex(0, -0.5) * (sp - sm);
  ops.sz = sz;
  return ops;
}

namespace detail {

// exp(-i a H) for Hermitian H via eigendecomposition.
inline Matrix unitary_exp(const Matrix& herm, double a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  const auto& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (int i = 0; i < lam.size(); ++i)
    phases(i) = std::exp(Complex(0, -a * lam(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Precomputed eigendecomposition of S_y; evaluates rotation matrices
// d(beta) = <n|exp(-i beta S_y)|k| for many beta values cheaply.
class WignerDEngine {
public:
  explicit WignerDEngine(SpinSize s) : s_(s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(spin_operators(s).sy);
    eigvals_ = es.eigenvalues();
    eigvecs_ = es.eigenvectors();
  }

  SpinSize spin() const { return s_; }

  // full d-matrix, rows/cols in descending m order; real for all beta
  RealMatrix matrix(double beta) const {
    Vector phases(eigvals_.size());
    for (int i = 0; i < eigvals_.size(); ++i)
      phases(i) = std::exp(Complex(0, -beta * eigvals_(i)));
    Matrix u = eigvecs_ * phases.asDiagonal() * eigvecs_.adjoint();
    return u.real();
  }

  double element(double n, double k, double beta) const {
    int in = s_.index_of(n);
    int ik = s_.index_of(k);
    return matrix(beta)(in, ik);
  }

private:
  SpinSize s_;
  Eigen::VectorXd eigvals_;
  Matrix eigvecs_;
};

// d^S_{nk}(beta) = <n|exp(-i beta S_y)|k>
inline double wigner_d(SpinSize s, double n, double k, double beta) {
  return WignerDEngine(s).element(n, k, beta);
}

// Irreducible tensor operator T_LM, orthonormal under the trace inner
// product, [S_z, T_LM] = M T_LM, adjoint relation T_LM^+ = (-1)^M T_{L,-M}.
// Built from T_LL proportional to (-1)^L S_+^L and ladder descent in M.
inline Matrix tensor_operator(SpinSize s, int L, int M) {
  if (L < 0 || L > s.two_s || std::abs(M) > L)
    throw std::domain_error("tensor_operator: invalid (L,M)");
  const int d = s.dim();
  Matrix sp = Matrix::Zero(d, d);
  for (int i = 1; i < d; ++i) {
    double m = s.m_of(i);
    sp(i - 1, i) = std::sqrt(s.s() * (s.s() + 1) - m * (m + 1));
  }
  Matrix sm = sp.adjoint();

  Matrix t = Matrix::Identity(d, d);
  for (int l = 0; l < L; ++l) t = sp * t;
  t *= ((L % 2 == 0) ? 1.0 : -1.0) / t.norm();
  for (int mm = L; mm > M; --mm) {
    // T_{L,m-1} = [S_-, T_{L,m}] / sqrt(L(L+1) - m(m-1))
    t = (sm * t - t * sm) / std::sqrt(double(L) * (L + 1) - double(mm) * (mm - 1));
  }
  return t;
}

// Full orthonormal operator basis, index (L,M) -> L*(L+1)+M... kept as a
// flat list ordered by L then M = -L..L. Ladder descent is done once per L.
inline std::vector<Matrix> tensor_operator_basis(SpinSize s) {
  const int d = s.dim();
  Matrix sp = Matrix::Zero(d, d);
  for (int i = 1; i < d; ++i) {
    double m = s.m_of(i);
    sp(i - 1, i) = std::sqrt(s.s() * (s.s() + 1) - m * (m + 1));
  }
  Matrix sm = sp.adjoint();

  std::vector<Matrix> basis;
  basis.reserve(d * d);
  for (int L = 0; L <= s.two_s; ++L) {
    std::vector<Matrix> row(2 * L + 1);  // M = L down to -L
    Matrix t = Matrix::Identity(d, d);
    for (int l = 0; l < L; ++l) t = sp * t;
    t *= ((L % 2 == 0) ? 1.0 : -1.0) / t.norm();
    row[0] = t;
    for (int k = 1; k <= 2 * L; ++k) {
      int mm = L - k + 1;
      row[k] = (sm * row[k - 1] - row[k - 1] * sm) /
               std::sqrt(double(L) * (L + 1) - double(mm) * (mm - 1));
    }
    for (int M = -L; M <= L; ++M) basis.push_back(row[L - M]);
  }
  return basis;
}

namespace detail {

// Normalized associated Legendre P~_L^M(u), M >= 0, Condon-Shortley phase,
// such that Y_LM = P~_L^M(cos theta) e^{i M phi}.
inline double normalized_assoc_legendre(int L, int M, double u) {
  const double pi = std::numbers::pi;
  double sin_th = std::sqrt(std::max(0.0, 1.0 - u * u));
  double pmm = std::sqrt(1.0 / (4.0 * pi));
  for (int m = 1; m <= M; ++m)
    pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_th;
  if (L == M) return pmm;
  double pm1 = u * std::sqrt(2.0 * M + 3.0) * pmm;  // l = M+1
  if (L == M + 1) return pm1;
  double plm = 0;
  for (int l = M + 2; l <= L; ++l) {
    double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(M) * M));
    double b = std::sqrt((double(l - 1) * (l - 1) - double(M) * M) /
                         (4.0 * double(l - 1) * (l - 1) - 1.0));
    plm = a * (u * pm1 - b * pmm);
    pmm = pm1;
    pm1 = plm;
  }
  return plm;
}

}  // namespace detail

// Orthonormal spherical harmonic with Condon-Shortley phase.
inline Complex spherical_harmonic(int L, int M, double theta, double phi) {
  if (std::abs(M) > L || L < 0)
    throw std::domain_error("spherical_harmonic: invalid (L,M)");
  int ma = std::abs(M);
  double p = detail::normalized_assoc_legendre(L, ma, std::cos(theta));
  Complex y = p * std::exp(Complex(0, ma * phi));
  if (M < 0) y = (ma % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
  return y;
}

}  // namespace spinchain
