#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>
#include <utility>
#include <vector>

#include "spinchain/measures.hpp"

namespace spinchain {

struct TimeMaximum {
  double t_star;
  double value;
};

// Grid argmax refined by a quadratic through the three surrounding points;
// ties break toward the earliest time.
inline TimeMaximum max_over_time(const MeasureSeries& series) {
  const auto& v = series.values;
  if (v.empty()) throw std::domain_error("max_over_time: empty series");
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  if (best == 0 || best + 1 == v.size() || v.size() < 3)
    return {series.times[best], v[best]};
  double y0 = v[best - 1], y1 = v[best], y2 = v[best + 1];
  double denom = y0 - 2 * y1 + y2;
  if (std::abs(denom) < 1e-300) return {series.times[best], v[best]};
  double shift = 0.5 * (y0 - y2) / denom;
  shift = std::clamp(shift, -0.5, 0.5);
  double h = series.times[1] - series.times[0];
  double val = y1 - 0.25 * (y0 - y2) * shift;
  return {series.times[best] + shift * h, val};
}

struct OptimizationProblem {
  SpinSize s;
  int n_sites;
  MeasureKind objective = MeasureKind::i_concurrence;
  MeasureTarget target;
  TimeGrid horizon;
  double mu_max = 0.5 * std::numbers::pi;
  double theta_max = 0.5 * std::numbers::pi;
  int scan_resolution = 24;
  int workers = 1;
  int refine_max_iter = 400;  // simplex iteration budget per cell
};

struct OptimizationResult {
  double mu_star = 0;
  double theta_star = 0;
  double value = 0;
  double t_star = 0;
  bool mu_flat = false;             // objective independent of mu (qubits)
  std::vector<double> scan_mu;      // coarse-scan axes and landscape,
  std::vector<double> scan_theta;   // row-major over (mu, theta)
  std::vector<double> landscape;
};

namespace detail {

inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  int nw = std::min(workers, n);
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

// Downhill simplex in 2 dimensions with box clamping.
inline void nelder_mead_2d(
    const std::function<double(double, double)>& f_max, double lo0, double hi0,
    double lo1, double hi1, std::array<double, 2>& x, double& fx,
    double diameter_tol = 1e-4, int max_iter = 400) {
  auto clamp = [&](std::array<double, 2> p) {
    p[0] = std::clamp(p[0], lo0, hi0);
    p[1] = std::clamp(p[1], lo1, hi1);
    return p;
  };
  auto f = [&](const std::array<double, 2>& p) { return -f_max(p[0], p[1]); };

  double step0 = std::max(1e-3, 0.05 * (hi0 - lo0));
  double step1 = std::max(1e-3, 0.05 * (hi1 - lo1));
  std::array<std::array<double, 2>, 3> v = {
      clamp(x), clamp({x[0] + step0, x[1]}), clamp({x[0], x[1] + step1})};
  std::array<double, 3> fv = {f(v[0]), f(v[1]), f(v[2])};

  for (int it = 0; it < max_iter; ++it) {
    // order best..worst
    std::array<int, 3> ord = {0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::array<std::array<double, 2>, 3> vs = {v[ord[0]], v[ord[1]], v[ord[2]]};
    std::array<double, 3> fs = {fv[ord[0]], fv[ord[1]], fv[ord[2]]};
    v = vs;
    fv = fs;

    double diam = std::max(
        std::max(std::abs(v[0][0] - v[1][0]), std::abs(v[0][0] - v[2][0])),
        std::max(std::abs(v[0][1] - v[1][1]), std::abs(v[0][1] - v[2][1])));
    if (diam < diameter_tol) break;

    std::array<double, 2> centroid = {0.5 * (v[0][0] + v[1][0]),
                                      0.5 * (v[0][1] + v[1][1])};
    auto refl = clamp({centroid[0] + (centroid[0] - v[2][0]),
                       centroid[1] + (centroid[1] - v[2][1])});
    double fr = f(refl);
    if (fr < fv[0]) {
      auto exp_ = clamp({centroid[0] + 2 * (centroid[0] - v[2][0]),
                         centroid[1] + 2 * (centroid[1] - v[2][1])});
      double fe = f(exp_);
      if (fe < fr) {
        v[2] = exp_;
        fv[2] = fe;
      } else {
        v[2] = refl;
        fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      v[2] = refl;
      fv[2] = fr;
    } else {
      auto con = clamp({centroid[0] + 0.5 * (v[2][0] - centroid[0]),
                        centroid[1] + 0.5 * (v[2][1] - centroid[1])});
      double fc = f(con);
      if (fc < fv[2]) {
        v[2] = con;
        fv[2] = fc;
      } else {  // shrink toward best
        for (int k = 1; k < 3; ++k) {
          v[k] = clamp({v[0][0] + 0.5 * (v[k][0] - v[0][0]),
                        v[0][1] + 0.5 * (v[k][1] - v[0][1])});
          fv[k] = f(v[k]);
        }
      }
    }
  }
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (fv[k] < fv[best]) best = k;
  if (-fv[best] > fx) {
    x = v[best];
    fx = -fv[best];
  }
}

}  // namespace detail

// objective value (max over the horizon) for one (mu, theta)
inline TimeMaximum evaluate_objective(const OptimizationProblem& p, double mu,
                                      double theta) {
  ChainSpec chain = uniform_chain(p.n_sites, p.s, {mu, theta});
  return max_over_time(measure_series(chain, p.horizon, p.objective, p.target));
}

// Coarse grid scan followed by simplex refinement from the best cell.
inline OptimizationResult optimize_mu_theta(const OptimizationProblem& p) {
  OptimizationResult res;
  const int n = p.scan_resolution;
  res.scan_mu.resize(n);
  res.scan_theta.resize(n);
  for (int i = 0; i < n; ++i) {
    res.scan_mu[i] = (n == 1) ? 0.0 : p.mu_max * i / (n - 1);
    res.scan_theta[i] = (n == 1) ? 0.0 : p.theta_max * i / (n - 1);
  }
  res.landscape.assign(n * n, 0.0);
  detail::parallel_for(n * n, p.workers, [&](int cell) {
    res.landscape[cell] =
        evaluate_objective(p, res.scan_mu[cell / n], res.scan_theta[cell % n]).value;
  });

  int best = 0;
  for (int cell = 1; cell < n * n; ++cell)
    if (res.landscape[cell] > res.landscape[best]) best = cell;

  // mu-flatness: at the best theta column, landscape constant in mu
  double col_min = res.landscape[best % n], col_max = col_min;
  for (int i = 0; i < n; ++i) {
    double v = res.landscape[i * n + best % n];
    col_min = std::min(col_min, v);
    col_max = std::max(col_max, v);
  }
  res.mu_flat = (col_max - col_min) < 1e-12;

  std::array<double, 2> x = {res.scan_mu[best / n], res.scan_theta[best % n]};
  double fx = res.landscape[best];
  if (p.mu_max > 0 && !res.mu_flat) {
    detail::nelder_mead_2d(
        [&](double mu, double th) { return evaluate_objective(p, mu, th).value; },
        0.0, p.mu_max, 0.0, p.theta_max, x, fx, 1e-4, p.refine_max_iter);
  } else {
    // 1-D refinement in theta only (degenerate or flat mu direction)
    double mu_fixed = res.mu_flat ? 0.0 : x[0];
    detail::nelder_mead_2d(
        [&](double, double th) { return evaluate_objective(p, mu_fixed, th).value; },
        x[0], x[0], 0.0, p.theta_max, x, fx, 1e-4, p.refine_max_iter);
    x[0] = mu_fixed;
  }
  auto fin = evaluate_objective(p, x[0], x[1]);
  res.mu_star = x[0];
  res.theta_star = x[1];
  res.value = fin.value;
  res.t_star = fin.t_star;
  return res;
}

struct PowerLawFit {
  double amplitude;
  double exponent;
  double residual;  // RMS residual in log-log space
};

// least squares of log y = log A + b log x
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw std::domain_error("fit_power_law: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    if (x <= 0 || y <= 0)
      throw std::domain_error("fit_power_law: non-positive data");
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(pts.size());
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double a = (sy - b * sx) / n;
  double ss = 0;
  for (auto [x, y] : pts) {
    double r = std::log(y) - (a + b * std::log(x));
    ss += r * r;
  }
  return {std::exp(a), b, std::sqrt(ss / n)};
}

struct ScalingCell {
  int two_s;
  int n_sites;
  double mu_star, theta_star, value, t_star;
};

struct ScalingStudy {
  std::vector<ScalingCell> cells;              // S outer, N inner
  PowerLawFit mu_of_s{0, 0, 0};                // mu*(S) at the smallest N... fits
  PowerLawFit theta_of_s{0, 0, 0};             // theta*(S)
  PowerLawFit max_of_s{0, 0, 0};               // max value vs S (largest N)
  PowerLawFit max_of_n{0, 0, 0};               // max value vs N (largest S)
};

// Runs optimize_mu_theta per (S, N) cell and fits the scaling laws.
inline ScalingStudy scaling_study(MeasureKind objective,
                                  const std::vector<int>& two_s_range,
                                  const std::vector<int>& n_range,
                                  const TimeGrid& horizon, int scan_resolution = 16,
                                  int workers = 1, int refine_max_iter = 400) {
  ScalingStudy st;
  std::vector<std::pair<int, int>> grid;
  for (int ts : two_s_range)
    for (int n : n_range) grid.emplace_back(ts, n);
  st.cells.resize(grid.size());
  detail::parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    auto [ts, n] = grid[i];
    SpinSize s(ts);
    OptimizationProblem p{s, n, objective, {}, horizon};
    p.scan_resolution = scan_resolution;
    p.refine_max_iter = refine_max_iter;
    if (objective == MeasureKind::negativity) {
      int j = std::max(1, n / 2);
      p.target = {j, j + 1};
    } else {
      p.target = {std::max(2, (n + 1) / 2), 0};  // internal site
    }
    auto r = optimize_mu_theta(p);
    st.cells[i] = {ts, n, r.mu_star, r.theta_star, r.value, r.t_star};
  });

  // fits in S at the largest N, fit in N at the largest S
  int ts_max = *std::max_element(two_s_range.begin(), two_s_range.end());
  int n_max = *std::max_element(n_range.begin(), n_range.end());
  std::vector<std::pair<double, double>> mu_pts, th_pts, vs_pts, vn_pts;
  for (const auto& c : st.cells) {
    double S = 0.5 * c.two_s;
    if (c.n_sites == n_max) {
      if (c.mu_star > 0) mu_pts.emplace_back(S, c.mu_star);
      if (c.theta_star > 0) th_pts.emplace_back(S, c.theta_star);
      if (c.value > 0) vs_pts.emplace_back(S, c.value);
    }
    if (c.two_s == ts_max && c.value > 0)
      vn_pts.emplace_back(c.n_sites, c.value);
  }
  if (mu_pts.size() >= 3) st.mu_of_s = fit_power_law(mu_pts);
  if (th_pts.size() >= 3) st.theta_of_s = fit_power_law(th_pts);
  if (vs_pts.size() >= 3) st.max_of_s = fit_power_law(vs_pts);
  if (vn_pts.size() >= 3) st.max_of_n = fit_power_law(vn_pts);
  return st;
}

}  // namespace spinchain
