#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spinchain/measures.hpp"

using namespace spinchain;

TEST_CASE("purity: pure, mixed, diagonal arithmetic") {
  Matrix proj = Matrix::Zero(3, 3);
  proj(0, 0) = 1;
  CHECK(purity(proj) == doctest::Approx(1.0));
  CHECK(purity(Matrix::Identity(4, 4) / 4.0) == doctest::Approx(0.25));
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.75;
  diag(1, 1) = 0.25;
  CHECK(purity(diag) == doctest::Approx(0.625));
  CHECK_THROWS_AS(purity(Matrix::Zero(2, 3)), std::domain_error);
}

TEST_CASE("i_concurrence: pure zero, maximally mixed exactly one") {
  for (int two_s : {1, 2, 7}) {
    SpinSize s(two_s);
    Matrix proj = Matrix::Zero(s.dim(), s.dim());
    proj(1, 1) = 1;
    CHECK(i_concurrence(proj, s) == doctest::Approx(0.0));
    CHECK(i_concurrence(Matrix::Identity(s.dim(), s.dim()) / s.dim(), s) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(i_concurrence(Matrix::Identity(3, 3) / 3.0, SpinSize(1)),
                  std::domain_error);
}

TEST_CASE("i_concurrence: qubit chain closed form 1 - cos^4(t/2)") {
  auto chain = uniform_chain(4, SpinSize(1), {0.0, 0.0});
  for (double t : {0.0, 0.9, 2.4, std::numbers::pi}) {
    double c = std::cos(0.5 * t);
    CHECK(i_concurrence(reduced_rho_one(chain, 2, t), chain.s) ==
          doctest::Approx(1.0 - c * c * c * c).epsilon(1e-12));
  }
}

namespace {

Matrix bell_state_rho() {
  Vector bell(4);
  bell << 1.0 / std::numbers::sqrt2, 0, 0, 1.0 / std::numbers::sqrt2;
  return bell * bell.adjoint();
}

Matrix kron2(const Matrix& a, const Matrix& b, int d) {
  Matrix out(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.block(i * d, j * d, d, d) = a(i, j) * b;
  return out;
}

}  // namespace

TEST_CASE("partial transpose: product rule, involution, Bell eigenvalue") {
  SpinSize s(2);
  Matrix ra = oracle::random_density(3), rb = oracle::random_density(3);
  Matrix prod = kron2(ra, rb, 3);
  Matrix pt = partial_transpose(prod, Transposed::first, s);
  CHECK((pt - kron2(ra.transpose(), rb, 3)).cwiseAbs().maxCoeff() < 1e-14);
  Matrix pt2 = partial_transpose(pt, Transposed::first, s);
  CHECK((pt2 - prod).cwiseAbs().maxCoeff() < 1e-15);
  Matrix pts = partial_transpose(prod, Transposed::second, s);
  CHECK((pts - kron2(ra, rb.transpose(), 3)).cwiseAbs().maxCoeff() < 1e-14);

  Matrix bpt = partial_transpose(bell_state_rho(), Transposed::first, SpinSize(1));
  Eigen::SelfAdjointEigenSolver<Matrix> es(bpt);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-0.5));
  CHECK_THROWS_AS(partial_transpose(prod, Transposed::first, SpinSize(1)),
                  std::domain_error);
}

TEST_CASE("trace norm: identities and SVD oracle") {
  CHECK(trace_norm(Matrix::Identity(5, 5)) == doctest::Approx(5.0));
  Matrix d2 = Matrix::Zero(2, 2);
  d2(0, 0) = 1;
  d2(1, 1) = -1;
  CHECK(trace_norm(d2) == doctest::Approx(2.0));
  for (int rep = 0; rep < 10; ++rep) {
    Matrix h = oracle::random_hermitian(6);
    CHECK(trace_norm(h) == doctest::Approx(oracle::trace_norm_svd(h)).epsilon(1e-10));
  }
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(trace_norm(bad), std::domain_error);
}

TEST_CASE("negativity: product zero, Bell value, prefactor") {
  SpinSize half(1);
  Matrix ra = oracle::random_density(2), rb = oracle::random_density(2);
  CHECK(negativity(kron2(ra, rb, 2), half) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(negativity(bell_state_rho(), half) == doctest::Approx(2.0));
  CHECK(negativity_raw(bell_state_rho(), half) == doctest::Approx(1.0));
}

TEST_CASE("negativity: chain pair is zero at t=0") {
  auto chain = uniform_chain(4, SpinSize(2), {0.4, 0.2});
  CHECK(negativity(reduced_rho_pair(chain, 2, 3, 0.0), chain.s) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("negativity vanishes for non-consecutive pairs (N=5, S=1)") {
  double mu = 0.856, th = 0.5 * std::atan(1.0);  // S=1 optimized-scale values
  auto chain = uniform_chain(5, SpinSize(2), {mu, th});
  for (double t : {0.3, 1.1, 2.0, 3.3, 5.0}) {
    for (auto [j, j2] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}, {1, 4}, {1, 5}})
      CHECK(std::abs(negativity(reduced_rho_pair(chain, j, j2, t), chain.s)) < 1e-8);
    // consecutive pairs do entangle at generic times
    if (t > 0.2 && t < 3.0)
      CHECK(negativity(reduced_rho_pair(chain, 2, 3, t), chain.s) > 1e-4);
  }
}

TEST_CASE("measure_series: zero horizon, qubit closed form, kinds") {
  auto chain = uniform_chain(3, SpinSize(1), {0.0, 0.0});
  TimeGrid zero{0.0, 0.0, 1};
  auto s0 = measure_series(chain, zero, MeasureKind::i_concurrence, {2, 0});
  REQUIRE(s0.values.size() == 1);
  CHECK(s0.values[0] == doctest::Approx(0.0));

  TimeGrid grid{0.0, 2 * std::numbers::pi, 33};
  auto ci = measure_series(chain, grid, MeasureKind::i_concurrence, {2, 0});
  for (size_t i = 0; i < ci.times.size(); ++i) {
    double c = std::cos(0.5 * ci.times[i]);
    CHECK(ci.values[i] == doctest::Approx(1 - c * c * c * c).epsilon(1e-12));
  }
  auto pu = measure_series(chain, grid, MeasureKind::purity, {2, 0});
  for (size_t i = 0; i < pu.times.size(); ++i)
    CHECK(pu.values[i] == doctest::Approx(1.0 - 0.5 * ci.values[i]).epsilon(1e-12));
  CHECK_THROWS_AS(measure_series(chain, grid, MeasureKind::negativity, {2, 0}),
                  std::domain_error);
}

TEST_CASE("invariant: i_concurrence is zero iff purity is one") {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> u(0, std::numbers::pi);
  auto chain = uniform_chain(4, SpinSize(3), {0.6, 0.25});
  for (double t : {0.0, 0.5, 1.5, 3.0}) {
    auto rho = reduced_rho_one(chain, 2, t);
    double ci = i_concurrence(rho, chain.s);
    CHECK(ci >= -1e-12);
    CHECK(ci <= 1.0 + 1e-12);
    CHECK((std::abs(ci) < 1e-10) == (std::abs(purity(rho) - 1.0) < 1e-10));
  }
}
