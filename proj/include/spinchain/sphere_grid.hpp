#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spinchain {

namespace detail {

struct GaussLegendre {
  std::vector<double> nodes;    // in (-1, 1), ascending
  std::vector<double> weights;
};

// Newton iteration on Legendre polynomials.
inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const double pi = std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[n - 1 - i] = x;  // ascending
    gl.weights[n - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return gl;
}

}  // namespace detail

// Product quadrature on the sphere: Gauss-Legendre in cos(theta), uniform
// trapezoidal phi. Exact for spherical-harmonic products up to degree 2S
// when n_theta >= 2S+1 and n_phi >= 4S+1.
struct SphereGrid {
  int n_theta;
  int n_phi;
  std::vector<double> u;         // cos(theta) nodes, ascending
  std::vector<double> u_weight;  // Gauss-Legendre weights
  std::vector<double> phi;       // uniform nodes in [0, 2pi)

  SphereGrid(int nt, int np) : n_theta(nt), n_phi(np) {
    if (nt < 1 || np < 1) throw std::invalid_argument("SphereGrid: bad size");
    auto gl = detail::gauss_legendre(nt);
    u = std::move(gl.nodes);
    u_weight = std::move(gl.weights);
    phi.resize(np);
    for (int i = 0; i < np; ++i) phi[i] = 2.0 * std::numbers::pi * i / np;
  }

  int size() const { return n_theta * n_phi; }
  // node index = it * n_phi + ip
  double theta_at(int node) const { return std::acos(u[node / n_phi]); }
  double u_at(int node) const { return u[node / n_phi]; }
  double phi_at(int node) const { return phi[node % n_phi]; }
  double weight(int node) const {
    return u_weight[node / n_phi] * 2.0 * std::numbers::pi / n_phi;
  }

  bool exact_for(int two_s) const {
    return n_theta >= two_s + 1 && n_phi >= 2 * two_s + 1;
  }

  static SphereGrid default_for(int two_s, int resolution_factor = 1) {
    return SphereGrid((two_s + 2) * resolution_factor,
                      (2 * two_s + 4) * resolution_factor);
  }
};

}  // namespace spinchain
