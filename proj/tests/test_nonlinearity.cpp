#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "qlab/dispersion.hpp"
#include "qlab/nonlinearity.hpp"
#include "qlab/presets.hpp"
#include "qlab/solver.hpp"
#include "test_util.hpp"

using namespace qlab;
using namespace qlab::testutil;
using cd = std::complex<double>;
using E = DiffPolynomial::Exponents;

namespace {
Field cosine(int k, int k_grid = 16) {
  std::vector<std::pair<int, cd>> m{{k, cd(0.5, 0)}};
  return Field::from_modes(k_grid, m);
}
Field sine(int k, int k_grid = 16) {
  std::vector<std::pair<int, cd>> m{{k, cd(0, -0.5)}};
  return Field::from_modes(k_grid, m);
}
}  // namespace

TEST_CASE("parser examples") {
  Nonlinearity n1 = parse_nonlinearity("2*u2*u1^2");
  REQUIRE(n1.monomials().size() == 1);
  CHECK(n1.monomials()[0] == Monomial{Rational(2), 0, 1, 2, 0});

  Nonlinearity n2 = parse_nonlinearity("u2^2*u0");
  REQUIRE(n2.monomials().size() == 1);
  CHECK(n2.monomials()[0] == Monomial{Rational(1), 0, 2, 0, 1});

  Nonlinearity merged = parse_nonlinearity("u1*u0 + (-1)*u1*u0 + u0^2");
  REQUIRE(merged.monomials().size() == 1);
  CHECK(merged.monomials()[0] == Monomial{Rational(1), 0, 0, 0, 2});

  Nonlinearity rat = parse_nonlinearity("-1/2*u0*u3 + 3/4*u1^2");
  CHECK(rat.monomials().size() == 2);
  CHECK(rat.p_max() == 2);
}

TEST_CASE("parser errors") {
  CHECK_THROWS_AS(parse_nonlinearity("2**u1"), ParseError);
  CHECK_THROWS_AS(parse_nonlinearity("u4"), ParseError);
  CHECK_THROWS_AS(parse_nonlinearity(""), ParseError);
  CHECK_THROWS_AS(parse_nonlinearity("u0"), DegreeTooLow);
  CHECK_THROWS_AS(parse_nonlinearity("3*u1"), DegreeTooLow);
  // total cancellation leaves nothing
  CHECK_THROWS_AS(parse_nonlinearity("u0^2 - u0^2"), EmptyNonlinearity);
}

TEST_CASE("json round trip") {
  Nonlinearity n = preset("kdv5").n;
  Nonlinearity r = nonlinearity_from_json(to_json(n));
  CHECK(r.monomials() == n.monomials());
}

TEST_CASE("evaluate on zero field") {
  Field z(16);
  for (const char* name : {"kdv5", "n1", "porous3"})
    CHECK(sobolev_norm(evaluate(preset(name).n, z), 4.0) == 0.0);
}

TEST_CASE("evaluate u0^2 on cos") {
  Nonlinearity n = parse_nonlinearity("u0^2");
  Field r = evaluate(n, cosine(1));
  CHECK(r.mode(0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.mode(2).real() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("evaluate N1 against pointwise oracle") {
  Nonlinearity n = parse_nonlinearity("2*u2*u1^2");
  Field r = evaluate(n, cosine(1));
  // 2 (-cos x)(-sin x)^2 sampled independently
  for (double x : {0.0, 0.4, 1.1, 3.0, 5.5}) {
    double expect = 2.0 * (-std::cos(x)) * std::sin(x) * std::sin(x);
    CHECK(eval_direct(r, x) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("p_density examples") {
  DiffPolynomial d1 = p_density(parse_nonlinearity("2*u2*u1^2"));
  DiffPolynomial expect1 = DiffPolynomial::term(2, E{0, 2, 0, 0, 0, 0, 0});
  CHECK(d1 == expect1);
  CHECK(d1.str() == "2*w1^2");

  DiffPolynomial d2 = p_density(parse_nonlinearity("u2^2*u0"));
  DiffPolynomial expect2 = DiffPolynomial::term(2, E{1, 0, 1, 0, 0, 0, 0});
  CHECK(d2 == expect2);

  CHECK(p_density(parse_nonlinearity("u1*u0")).is_zero());
}

TEST_CASE("p_functional examples") {
  Nonlinearity n1 = parse_nonlinearity("2*u2*u1^2");
  Field c1 = cosine(1);
  // (1/pi) int sin^2 = 1, cross-checked by an independent quadrature oracle
  double oracle = quad_mean(
      [](double x) { return 2.0 * std::sin(x) * std::sin(x); });
  CHECK(p_functional(n1, c1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(p_functional(n1, c1) == doctest::Approx(oracle).epsilon(1e-13));

  Nonlinearity both = parse_nonlinearity("2*u2*u1^2 + u2^2*u0");
  for (std::uint64_t seed : {4ULL, 5ULL, 6ULL}) {
    Field f = random_band_field(seed, 3.0, 1.0, 24);
    CHECK(std::abs(p_functional(both, f)) < 1e-12);
  }
}

TEST_CASE("p_functional of the quartic flux") {
  Nonlinearity n = parse_nonlinearity("4*u1^3*u2");
  CHECK(std::abs(p_functional(n, cosine(1))) < 1e-14);

  // cos x + cos 2x: the density (2/pi)(df)^3 is a cube of pure sines, whose
  // mean vanishes; the quadrature oracle agrees.
  Field f = cosine(1) + cosine(2);
  double oracle = quad_mean([](double x) {
    double df = -std::sin(x) - 2.0 * std::sin(2 * x);
    return 4.0 * df * df * df;
  });
  CHECK(std::abs(oracle) < 1e-13);
  CHECK(std::abs(p_functional(n, f)) < 1e-13);

  // cos x + sin 2x: mean value -6, by hand and by the oracle.
  Field g = cosine(1) + sine(2);
  double oracle2 = quad_mean([](double x) {
    double dg = -std::sin(x) + 2.0 * std::cos(2 * x);
    return 4.0 * dg * dg * dg;
  });
  CHECK(oracle2 == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(p_functional(n, g) == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("p_functional quadrature matches mode space") {
  Nonlinearity n = preset("porous3").n;
  for (std::uint64_t seed : {11ULL, 12ULL}) {
    Field f = random_band_field(seed, 3.0, 0.8, 20);
    double via_modes = p_functional(n, f);
    double via_quad = quad_mean(
        [&](double x) {
          double w0 = eval_direct(f, x);
          return 3.0 * w0 * w0;
        },
        8192);
    CHECK(close(via_modes, via_quad, 1e-12));
  }
}

TEST_CASE("total derivative examples") {
  DiffPolynomial w0 = DiffPolynomial::term(1, E{1, 0, 0, 0, 0, 0, 0});
  CHECK(total_derivative(w0) == DiffPolynomial::term(1, E{0, 1, 0, 0, 0, 0, 0}));

  DiffPolynomial w0w1 = DiffPolynomial::term(1, E{1, 1, 0, 0, 0, 0, 0});
  DiffPolynomial expect = DiffPolynomial::term(1, E{0, 2, 0, 0, 0, 0, 0}) +
                          DiffPolynomial::term(1, E{1, 0, 1, 0, 0, 0, 0});
  CHECK(total_derivative(w0w1) == expect);

  DiffPolynomial w1cu = DiffPolynomial::term(1, E{0, 3, 0, 0, 0, 0, 0});
  CHECK(total_derivative(w1cu) ==
        DiffPolynomial::term(3, E{0, 2, 1, 0, 0, 0, 0}));

  DiffPolynomial w6 = DiffPolynomial::term(1, E{0, 0, 0, 0, 0, 0, 1});
  CHECK_THROWS_AS(total_derivative(w6), JetOverflow);
}

TEST_CASE("euler operator examples") {
  CHECK(euler_operator(DiffPolynomial::term(1, E{0, 0, 1, 0, 0, 0, 0}))
            .is_zero());

  DiffPolynomial w1sq = DiffPolynomial::term(1, E{0, 2, 0, 0, 0, 0, 0});
  CHECK(euler_operator(w1sq) ==
        DiffPolynomial::term(-2, E{0, 0, 1, 0, 0, 0, 0}));

  DiffPolynomial combo = DiffPolynomial::term(2, E{0, 2, 0, 0, 0, 0, 0}) +
                         DiffPolynomial::term(2, E{1, 0, 1, 0, 0, 0, 0});
  CHECK(euler_operator(combo).is_zero());
}

TEST_CASE("euler annihilates total derivatives (fuzz)") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    DiffPolynomial L;
    int terms = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < terms; ++t) {
      E e{};
      e[0] = rng() % 3;
      e[1] = rng() % 3;
      e[2] = rng() % 2;
      long long num = static_cast<long long>(rng() % 11) - 5;
      long long den = 1 + static_cast<long long>(rng() % 4);
      if (num != 0) L.add_term(Rational(num, den), e);
    }
    CHECK(euler_operator(total_derivative(L)).is_zero());
  }
}

TEST_CASE("classifier on the example equations") {
  CHECK(classify(preset("kdv5").n) == ResonanceType::NonParabolic);
  CHECK(classify(parse_nonlinearity("2*u2*u1^2")) == ResonanceType::Parabolic);
  Nonlinearity porous3 = preset("porous3").n;
  CHECK(classify(porous3) == ResonanceType::Parabolic);
  CHECK(p_density(porous3) == DiffPolynomial::term(3, E{2, 0, 0, 0, 0, 0, 0}));
  CHECK(euler_operator(p_density(porous3)) ==
        DiffPolynomial::term(6, E{1, 0, 0, 0, 0, 0, 0}));
}

TEST_CASE("classifier invariant under scaling") {
  std::mt19937_64 rng(123);
  for (const char* name : {"kdv5", "n1", "n1n2", "porous2"}) {
    Nonlinearity n = preset(name).n;
    for (int t = 0; t < 5; ++t) {
      long long num = 1 + static_cast<long long>(rng() % 7);
      long long den = 1 + static_cast<long long>(rng() % 5);
      Rational c(rng() % 2 ? num : -num, den);
      std::vector<Monomial> scaled = n.monomials();
      for (Monomial& m : scaled) m.lambda = m.lambda * c;
      CHECK(classify(Nonlinearity(scaled)) == classify(n));
    }
  }
}

TEST_CASE("conserves_mean examples") {
  CHECK(conserves_mean(preset("kdv5").n));
  CHECK_FALSE(conserves_mean(parse_nonlinearity("u0^2")));
  CHECK(conserves_mean(parse_nonlinearity("u1*u0")));
}

TEST_CASE("non-parabolic functional vanishes numerically") {
  for (const char* name : {"kdv5", "n1n2", "benney"}) {
    Nonlinearity n = preset(name).n;
    REQUIRE(classify(n) == ResonanceType::NonParabolic);
    for (int i = 0; i < 100; ++i) {
      Field f = random_band_field(500 + i, 2.0 + (i % 4), 0.5, 24);
      double bound =
          1e-10 * std::pow(1.0 + sobolev_norm(f, 4.0), n.p_max());
      CHECK(std::abs(p_functional(n, f)) <= bound);
    }
  }
}

TEST_CASE("j1 functional trivial cases") {
  DispersionSymbol quintic = DispersionSymbol::pure_power(2);
  Nonlinearity n1 = parse_nonlinearity("2*u2*u1^2");
  CHECK(j1_functional(n1, Field(16), quintic, 0.0) == 0.0);

  // all b_j = 0: every term of the density carries b_j
  Nonlinearity nob = parse_nonlinearity("u1^2*u0 + u0^3");
  CHECK(j1_functional(nob, cosine(1), quintic, 0.25) == 0.0);
}

TEST_CASE("j1 functional against finite differences") {
  DispersionSymbol quintic = DispersionSymbol::pure_power(2);
  Nonlinearity n1 = parse_nonlinearity("2*u2*u1^2");
  Field phi = cosine(1, 32);

  double j1 = j1_functional(n1, phi, quintic, 0.0);
  CHECK(j1 == doctest::Approx(-1.0).epsilon(1e-10));  // hand value

  // central finite difference of P_N(u(t)) around t = 0 along the flow
  Equation eq{quintic, n1, 0.0};
  Equation back = transformed(eq);
  const double h = 1e-4;
  EvolveOptions opt;
  opt.stride = 1000000;
  Trajectory fwd = evolve(eq, phi, h, 1e-5, opt);
  Trajectory bwd = evolve(back, phi, h, 1e-5, opt);
  double p_plus = p_functional(n1, fwd.frames.back());
  double p_minus = p_functional(n1, bwd.frames.back());
  double fd = (p_plus - p_minus) / (2.0 * h);
  CHECK(j1 == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("j1 with eps shifts the derivative") {
  DispersionSymbol quintic = DispersionSymbol::pure_power(2);
  Nonlinearity n1 = parse_nonlinearity("2*u2*u1^2");
  Field phi = cosine(1, 32);
  double j1_eps = j1_functional(n1, phi, quintic, 0.5);

  Equation eq{quintic, n1, 0.5};
  const double h = 1e-4;
  EvolveOptions opt;
  opt.stride = 1000000;
  Trajectory fwd = evolve(eq, phi, h, 1e-5, opt);
  double fd = (p_functional(n1, fwd.frames.back()) - p_functional(n1, phi)) / h;
  CHECK(j1_eps == doctest::Approx(fd).epsilon(1e-3));
}
