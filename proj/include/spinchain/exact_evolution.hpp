#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/state_prep.hpp"

namespace spinchain {

// Open chain under H = sum_j S_z_j S_z_{j+1}, coupling 1. Sites are 1-based.
struct ChainSpec {
  int n_sites;
  SpinSize s;
  std::vector<SingleSpinState> site_states;

  ChainSpec(int n, SpinSize spin, std::vector<SingleSpinState> states)
      : n_sites(n), s(spin), site_states(std::move(states)) {
    if (n_sites < 2) throw std::invalid_argument("ChainSpec: need N >= 2");
    if (static_cast<int>(site_states.size()) != n_sites)
      throw std::invalid_argument("ChainSpec: wrong number of site states");
  }

  const SingleSpinState& site(int j) const {  // 1-based
    if (j < 1 || j > n_sites) throw std::domain_error("ChainSpec: bad site index");
    return site_states[j - 1];
  }
};

inline ChainSpec uniform_chain(int n, SpinSize s, const PreparationParams& p) {
  return ChainSpec(n, s, std::vector<SingleSpinState>(n, prepare_initial(s, p)));
}

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 2.0 * std::numbers::pi;
  int n_points = 128;

  double at(int i) const {
    if (n_points == 1) return t_start;
    return t_start + (t_end - t_start) * i / (n_points - 1);
  }
};

using DensityMatrix = Matrix;

// f(Delta, t) = sum_k |c_k|^2 e^{-i t Delta k}: the coherence damping a
// traced-out neighbor applies under the diagonal coupling. Summation runs
// in ascending k for reproducibility.
inline Complex dephasing_kernel(const SingleSpinState& state, int delta, double t) {
  if (std::abs(delta) > state.s.two_s)
    throw std::domain_error("dephasing_kernel: |delta| > 2S");
  Complex f = 0;
  for (int i = state.s.dim() - 1; i >= 0; --i) {  // k ascending
    double k = state.s.m_of(i);
    f += std::norm(state.amplitudes(i)) * std::exp(Complex(0, -t * delta * k));
  }
  return f;
}

namespace detail {

// Same sum with |delta| up to 4S (shared-neighbor case of next-nearest pairs).
inline Complex joint_kernel(const SingleSpinState& state, int delta_sum, double t) {
  Complex f = 0;
  for (int i = state.s.dim() - 1; i >= 0; --i) {
    double k = state.s.m_of(i);
    f += std::norm(state.amplitudes(i)) * std::exp(Complex(0, -t * delta_sum * k));
  }
  return f;
}

}  // namespace detail

// rho_j(m, m') = c_m c_m'^* prod_{neighbors l} f^(l)(m - m', t)
inline DensityMatrix reduced_rho_one(const ChainSpec& chain, int j, double t) {
  const auto& st = chain.site(j);
  const int d = chain.s.dim();
  DensityMatrix rho(d, d);
  std::vector<const SingleSpinState*> nb;
  if (j > 1) nb.push_back(&chain.site(j - 1));
  if (j < chain.n_sites) nb.push_back(&chain.site(j + 1));
  // kernel depends on m - m' only
  std::vector<Complex> f(2 * d - 1);
  for (int delta = -(d - 1); delta <= d - 1; ++delta) {
    Complex v = 1;
    for (auto* n : nb) v *= dephasing_kernel(*n, delta, t);
    f[delta + d - 1] = v;
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      int delta = b - a;  // m_a - m_b = (S-a) - (S-b)
      rho(a, b) = st.amplitudes(a) * std::conj(st.amplitudes(b)) * f[delta + d - 1];
    }
  return rho;
}

// Reduced pair state rho_{j,j2}, j < j2, in the basis |m_j> x |m_j2>
// (row index a*d + c). Three adjacency cases: nearest neighbors carry the
// explicit cross phase, next-nearest share one dephasing neighbor, farther
// pairs factorize completely.
inline DensityMatrix reduced_rho_pair(const ChainSpec& chain, int j, int j2, double t) {
  if (j < 1 || j2 <= j || j2 > chain.n_sites)
    throw std::domain_error("reduced_rho_pair: need 1 <= j < j2 <= N");
  const int d = chain.s.dim();
  const auto& s1 = chain.site(j);
  const auto& s2 = chain.site(j2);

  auto outer_kernel = [&](int site, int delta) -> Complex {
    if (site < 1 || site > chain.n_sites) return 1.0;
    return dephasing_kernel(chain.site(site), delta, t);
  };

  DensityMatrix rho(d * d, d * d);
  const int sep = j2 - j;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      int d1 = b - a;  // m_j - m'_j
      double ma = chain.s.m_of(a), mb = chain.s.m_of(b);
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          int d2 = e - c;  // m_j2 - m'_j2
          double mc = chain.s.m_of(c), me = chain.s.m_of(e);
          Complex amp = s1.amplitudes(a) * s2.amplitudes(c) *
                        std::conj(s1.amplitudes(b)) * std::conj(s2.amplitudes(e));
          Complex mid;
          if (sep == 1) {
            mid = std::exp(Complex(0, -t * (ma * mc - mb * me)));
          } else if (sep == 2) {
            mid = detail::joint_kernel(chain.site(j + 1), d1 + d2, t);
            // sites strictly between j and j2 other than j+1: none
          } else {
            mid = outer_kernel(j + 1, d1) * outer_kernel(j2 - 1, d2);
            // sites between j+2 and j2-2 never couple to either spin
          }
          rho(a * d + c, b * d + e) =
              amp * mid * outer_kernel(j - 1, d1) * outer_kernel(j2 + 1, d2);
        }
    }
  return rho;
}

// Exact diagonal evolution of the full product state; test oracle only.
// Basis enumeration is mixed-radix with site 1 as the most significant digit.
inline Vector full_statevector(const ChainSpec& chain, double t,
                               std::int64_t amplitude_cap = 2'000'000) {
  const int d = chain.s.dim();
  std::int64_t dim = 1;
  for (int j = 0; j < chain.n_sites; ++j) {
    dim *= d;
    if (dim > amplitude_cap)
      throw ResourceError("full_statevector: dimension exceeds cap");
  }
  Vector psi(dim);
  std::vector<int> idx(chain.n_sites, 0);
  for (std::int64_t x = 0; x < dim; ++x) {
    Complex amp = 1;
    double phase = 0;
    for (int j = 0; j < chain.n_sites; ++j) {
      amp *= chain.site_states[j].amplitudes(idx[j]);
      if (j + 1 < chain.n_sites)
        phase += chain.s.m_of(idx[j]) * chain.s.m_of(idx[j + 1]);
    }
    psi(x) = amp * std::exp(Complex(0, -t * phase));
    for (int j = chain.n_sites - 1; j >= 0; --j) {
      if (++idx[j] < d) break;
      idx[j] = 0;
    }
  }
  return psi;
}

// Partial trace onto one or two kept sites (1-based, ascending).
inline DensityMatrix reduced_from_statevector(const Vector& psi, int n_sites,
                                              SpinSize s, std::set<int> keep) {
  if (keep.empty() || keep.size() > 2)
    throw std::domain_error("reduced_from_statevector: keep 1 or 2 sites");
  const int d = s.dim();
  std::vector<std::int64_t> stride(n_sites);
  std::int64_t acc = 1;
  for (int j = n_sites - 1; j >= 0; --j) {
    stride[j] = acc;
    acc *= d;
  }
  if (acc != psi.size())
    throw std::domain_error("reduced_from_statevector: size mismatch");

  std::vector<int> kept(keep.begin(), keep.end());
  for (int k : kept)
    if (k < 1 || k > n_sites)
      throw std::domain_error("reduced_from_statevector: bad site");
  std::vector<std::int64_t> env_strides;
  for (int j = 1; j <= n_sites; ++j)
    if (!keep.count(j)) env_strides.push_back(stride[j - 1]);

  const int kd = (kept.size() == 1) ? d : d * d;
  DensityMatrix rho = DensityMatrix::Zero(kd, kd);
  std::int64_t env_dim = 1;
  for (size_t i = 0; i < env_strides.size(); ++i) env_dim *= d;

  for (std::int64_t env = 0; env < env_dim; ++env) {
    std::int64_t base = 0;
    std::int64_t e = env;
    for (auto es : env_strides) {
      base += (e % d) * es;
      e /= d;
    }
    for (int r = 0; r < kd; ++r) {
      std::int64_t xr = base;
      if (kept.size() == 1) {
        xr += r * stride[kept[0] - 1];
      } else {
        xr += (r / d) * stride[kept[0] - 1] + (r % d) * stride[kept[1] - 1];
      }
      for (int c = 0; c < kd; ++c) {
        std::int64_t xc = base;
        if (kept.size() == 1) {
          xc += c * stride[kept[0] - 1];
        } else {
          xc += (c / d) * stride[kept[0] - 1] + (c % d) * stride[kept[1] - 1];
        }
        rho(r, c) += psi(xr) * std::conj(psi(xc));
      }
    }
  }
  return rho;
}

inline DensityMatrix hermitized(const DensityMatrix& rho) {
  return 0.5 * (rho + rho.adjoint().eval());
}

}  // namespace spinchain
