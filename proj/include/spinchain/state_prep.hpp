#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "spinchain/spin_algebra.hpp"

namespace spinchain {

// One spin's amplitudes in the descending S_z basis.
struct SingleSpinState {
  SpinSize s;
  Vector amplitudes;  // length 2S+1, index i <-> m = S - i

  double norm() const { return amplitudes.norm(); }
};

struct PreparationParams {
  double mu = 0.0;         // squeezing strength
  double theta_rot = 0.0;  // rotation angle about x
};

// Equatorial coherent state |pi/2, 0>: amplitudes are the square roots of
// binomial weights, evaluated in log space to stay finite at large S.
inline SingleSpinState coherent_equator(SpinSize s) {
  const int d = s.dim();
  const double S = s.s();
  SingleSpinState st{s, Vector(d)};
  for (int i = 0; i < d; ++i) {
    double k = s.m_of(i);
    double lg = -0.5 * s.two_s * std::numbers::ln2 +
                0.5 * (std::lgamma(s.two_s + 1.0) - std::lgamma(S - k + 1.0) -
                       std::lgamma(S + k + 1.0));
    st.amplitudes(i) = std::exp(lg);
  }
  return st;
}

// exp(-i mu S_z^2): diagonal phases e^{-i mu k^2}
inline SingleSpinState squeeze(const SingleSpinState& state, double mu) {
  SingleSpinState out = state;
  for (int i = 0; i < state.s.dim(); ++i) {
    double k = state.s.m_of(i);
    out.amplitudes(i) *= std::exp(Complex(0, -mu * k * k));
  }
  return out;
}

// exp(+i theta S_x) via eigendecomposition of S_x
inline SingleSpinState rotate_x(const SingleSpinState& state, double theta_rot) {
  Matrix u = detail::unitary_exp(spin_operators(state.s).sx, -theta_rot);
  return {state.s, u * state.amplitudes};
}

// |psi_0> = e^{i theta S_x} e^{-i mu S_z^2} |pi/2, 0>
inline SingleSpinState prepare_initial(SpinSize s, const PreparationParams& p) {
  return rotate_x(squeeze(coherent_equator(s), p.mu), p.theta_rot);
}

inline Matrix density_of(const SingleSpinState& st) {
  return st.amplitudes * st.amplitudes.adjoint();
}

}  // namespace spinchain
