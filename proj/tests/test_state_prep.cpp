#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spinchain/state_prep.hpp"

using namespace spinchain;

TEST_CASE("coherent equator: binomial amplitudes") {
  auto half = coherent_equator(SpinSize(1));
  CHECK(half.amplitudes(0).real() == doctest::Approx(std::numbers::sqrt2 / 2));
  CHECK(half.amplitudes(1).real() == doctest::Approx(std::numbers::sqrt2 / 2));
  auto one = coherent_equator(SpinSize(2));
  CHECK(one.amplitudes(0).real() == doctest::Approx(0.5));
  CHECK(one.amplitudes(1).real() == doctest::Approx(std::numbers::sqrt2 / 2));
  CHECK(one.amplitudes(2).real() == doctest::Approx(0.5));
}

TEST_CASE("coherent equator: normalized, real positive, large S stays finite") {
  for (int two_s : {1, 2, 9, 40, 170, 200}) {
    auto st = coherent_equator(SpinSize(two_s));
    CHECK(st.norm() == doctest::Approx(1.0).epsilon(1e-13));
    for (int i = 0; i < st.s.dim(); ++i) {
      CHECK(st.amplitudes(i).imag() == 0.0);
      CHECK(st.amplitudes(i).real() > 0.0);
    }
  }
}

TEST_CASE("squeeze: mu=0 identity, moduli preserved") {
  auto st = coherent_equator(SpinSize(5));
  auto same = squeeze(st, 0.0);
  CHECK((same.amplitudes - st.amplitudes).norm() == 0.0);
  auto sq = squeeze(st, 1.37);
  for (int i = 0; i < st.s.dim(); ++i)
    CHECK(std::abs(sq.amplitudes(i)) ==
          doctest::Approx(std::abs(st.amplitudes(i))));
  CHECK(sq.norm() == doctest::Approx(1.0));
}

TEST_CASE("squeeze: global phase only for qubits") {
  auto st = coherent_equator(SpinSize(1));
  double mu = 0.83;
  auto sq = squeeze(st, mu);
  Complex phase = std::exp(Complex(0, -mu * 0.25));
  CHECK((sq.amplitudes - phase * st.amplitudes).norm() < 1e-15);
}

TEST_CASE("rotate_x: identity at 0, unitary, matches 2x2 oracle") {
  auto st = coherent_equator(SpinSize(3));
  CHECK((rotate_x(st, 0.0).amplitudes - st.amplitudes).norm() < 1e-14);

  // spin-1/2: e^{i pi S_x} |+1/2> = i |-1/2>
  SingleSpinState up{SpinSize(1), Vector(2)};
  up.amplitudes << 1.0, 0.0;
  auto flipped = rotate_x(up, std::numbers::pi);
  CHECK(std::abs(flipped.amplitudes(0)) < 1e-14);
  CHECK(std::abs(flipped.amplitudes(1) - Complex(0, 1)) < 1e-14);

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0, std::numbers::pi);
  for (int two_s : {1, 4, 9, 14}) {
    SpinSize s(two_s);
    double th = u(gen);
    Matrix expect = oracle::unitary_exp(spin_operators(s).sx, -th);
    auto eq = coherent_equator(s);
    auto got = rotate_x(squeeze(eq, 0.31), th);
    CHECK((got.amplitudes - expect * squeeze(eq, 0.31).amplitudes).norm() < 1e-12);
    CHECK(got.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("prepare_initial: composition order and determinism") {
  SpinSize s(10);
  PreparationParams p{0.5, 0.2645};
  auto a = prepare_initial(s, p);
  auto b = rotate_x(squeeze(coherent_equator(s), p.mu), p.theta_rot);
  CHECK((a.amplitudes - b.amplitudes).norm() == 0.0);
  auto c = prepare_initial(s, p);
  for (int i = 0; i < s.dim(); ++i) {
    CHECK(a.amplitudes(i).real() == c.amplitudes(i).real());
    CHECK(a.amplitudes(i).imag() == c.amplitudes(i).imag());
  }
  CHECK((prepare_initial(s, {0, 0}).amplitudes - coherent_equator(s).amplitudes)
            .norm() < 1e-15);
}

TEST_CASE("prepare_initial: normalization over random parameters") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0, std::numbers::pi);
  for (int rep = 0; rep < 100; ++rep) {
    SpinSize s(1 + rep % 12);
    auto st = prepare_initial(s, {u(gen), 0.5 * u(gen)});
    CHECK(st.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("squeezing: minimal tangent-quadrature variance drops below S/2") {
  for (int two_s : {10, 14}) {
    SpinSize s(two_s);
    double S = s.s();
    double th = 0.5 * std::atan(std::pow(S, -1.0 / 3.0));
    auto ops = spin_operators(s);
    auto min_var = [&](const SingleSpinState& st) {
      double best = std::numeric_limits<double>::max();
      for (int i = 0; i < 360; ++i) {
        double alpha = i * std::numbers::pi / 360;
        Matrix q = std::cos(alpha) * ops.sy + std::sin(alpha) * ops.sz;
        Complex m1 = st.amplitudes.adjoint() * q * st.amplitudes;
        Complex m2 = st.amplitudes.adjoint() * q * q * st.amplitudes;
        best = std::min(best, m2.real() - m1.real() * m1.real());
      }
      return best;
    };
    for (double mu : {0.126 * std::pow(S, -0.858), 0.5})
      CHECK(min_var(prepare_initial(s, {mu, th})) < 0.5 * S);
    // the coherent state itself saturates S/2
    CHECK(min_var(coherent_equator(s)) == doctest::Approx(0.5 * S).epsilon(1e-9));
  }
}
