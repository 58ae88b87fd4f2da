#pragma once

#include <string>
#include <vector>

#include "spinchain/exact_evolution.hpp"

namespace spinchain {

inline double purity(const DensityMatrix& rho) {
  if (rho.rows() != rho.cols()) throw std::domain_error("purity: non-square");
  return (rho * rho).trace().real();
}

// C_I = (2S+1)/(2S) (1 - Tr rho^2); equals 1 for the maximally mixed state.
inline double i_concurrence(const DensityMatrix& rho_j, SpinSize s) {
  if (rho_j.rows() != s.dim())
    throw std::domain_error("i_concurrence: dimension mismatch");
  return (s.two_s + 1.0) / s.two_s * (1.0 - purity(rho_j));
}

enum class Transposed { first, second };

// Transpose one tensor factor of a two-site operator in the product basis.
inline DensityMatrix partial_transpose(const DensityMatrix& rho_pair,
                                       Transposed which, SpinSize s) {
  const int d = s.dim();
  if (rho_pair.rows() != d * d)
    throw std::domain_error("partial_transpose: dimension mismatch");
  DensityMatrix out(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          if (which == Transposed::first)
            out(a * d + c, b * d + e) = rho_pair(b * d + c, a * d + e);
          else
            out(a * d + c, b * d + e) = rho_pair(a * d + e, b * d + c);
        }
  return out;
}

// Sum of absolute eigenvalues of the Hermitized input.
inline double trace_norm(const DensityMatrix& m) {
  if (!m.allFinite()) throw std::domain_error("trace_norm: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitized(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// Paper-normalized negativity, prefactor (2S+1)/(2S).
inline double negativity(const DensityMatrix& rho_pair, SpinSize s) {
  const int d = s.dim();
  if (rho_pair.rows() != d * d)
    throw std::domain_error("negativity: dimension mismatch");
  return (s.two_s + 1.0) / s.two_s *
         (trace_norm(partial_transpose(rho_pair, Transposed::first, s)) - 1.0);
}

// Raw variant, no prefactor; used for the phase-space comparisons.
inline double negativity_raw(const DensityMatrix& rho_pair, SpinSize s) {
  const int d = s.dim();
  if (rho_pair.rows() != d * d)
    throw std::domain_error("negativity: dimension mismatch");
  return trace_norm(partial_transpose(rho_pair, Transposed::first, s)) - 1.0;
}

enum class MeasureKind { i_concurrence, negativity, purity };

inline std::string to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::i_concurrence: return "i_concurrence";
    case MeasureKind::negativity: return "negativity";
    case MeasureKind::purity: return "purity";
  }
  return "?";
}

// Site for single-spin measures; (site, site2) pair for negativity.
struct MeasureTarget {
  int site = 0;
  int site2 = 0;  // 0 when single-site
  bool is_pair() const { return site2 != 0; }
};

struct MeasureSeries {
  std::vector<double> times;
  std::vector<double> values;
  MeasureKind kind;
  MeasureTarget target;
};

inline double evaluate_measure(const ChainSpec& chain, MeasureKind kind,
                               const MeasureTarget& target, double t) {
  switch (kind) {
    case MeasureKind::purity:
      return purity(reduced_rho_one(chain, target.site, t));
    case MeasureKind::i_concurrence:
      return i_concurrence(reduced_rho_one(chain, target.site, t), chain.s);
    case MeasureKind::negativity:
      if (!target.is_pair())
        throw std::domain_error("measure_series: negativity needs a pair");
      return negativity(reduced_rho_pair(chain, target.site, target.site2, t),
                        chain.s);
  }
  throw std::domain_error("measure_series: unknown kind");
}

inline MeasureSeries measure_series(const ChainSpec& chain, const TimeGrid& grid,
                                    MeasureKind kind, const MeasureTarget& target) {
  MeasureSeries out;
  out.kind = kind;
  out.target = target;
  out.times.reserve(grid.n_points);
  out.values.reserve(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    double t = grid.at(i);
    out.times.push_back(t);
    out.values.push_back(evaluate_measure(chain, kind, target, t));
  }
  return out;
}

}  // namespace spinchain
