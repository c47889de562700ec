#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>

#include "doctest.h"
#include "qlab/presets.hpp"

using namespace qlab;

TEST_CASE("registry classifications match the recorded labels") {
  struct Row {
    const char* name;
    ResonanceType type;
    bool mean;
  };
  const Row rows[] = {
      {"kdv5", ResonanceType::NonParabolic, true},
      {"mkdv5", ResonanceType::NonParabolic, true},
      {"benney", ResonanceType::NonParabolic, true},
      {"lisher", ResonanceType::NonParabolic, true},
      {"n1", ResonanceType::Parabolic, true},
      {"n2", ResonanceType::Parabolic, false},
      {"n1n2", ResonanceType::NonParabolic, false},
      {"porous2", ResonanceType::Parabolic, true},
      {"porous3", ResonanceType::Parabolic, true},
      {"plap5", ResonanceType::Parabolic, true},
      {"quartic11", ResonanceType::Parabolic, true},
  };
  auto t0 = std::chrono::steady_clock::now();
  for (const Row& r : rows) {
    Preset p = preset(r.name);
    CHECK(p.type == r.type);                  // re-verified at load
    CHECK(classify(p.n) == r.type);           // and here, explicitly
    CHECK(conserves_mean(p.n) == r.mean);
    CHECK_FALSE(p.provenance.empty());
  }
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  CHECK(ms < 1000.0);  // the whole golden table classifies in under 1 s
}

TEST_CASE("preset expansions") {
  Preset kdv5 = preset("kdv5");
  REQUIRE(kdv5.n.monomials().size() == 3);
  CHECK(kdv5.n.p_max() == 3);

  Preset q11 = preset("quartic11");
  CHECK(q11.sym.order() == 11);
  CHECK(phi_symbol(q11.sym, 2) == std::complex<double>(0, -2048));

  Preset lisher = preset("lisher");
  CHECK(lisher.sym.gammas[1] == Rational(1));  // d^5 + d^3 linear part
  CHECK(lisher.n.p_max() == 3);
}

TEST_CASE("unknown preset") {
  CHECK_THROWS_AS(preset("kdv7"), UnknownPreset);
  CHECK(preset_names().size() == 11);
}

// The registry stores hand-expanded monomial forms; rebuild each right-hand
// side from its divergence form through an independent route (products and
// spectral derivatives) and compare.
TEST_CASE("preset expansions match their divergence forms") {
  // Data band-limited to 24 inside a K_grid = 96 field: every intermediate
  // binary product in the reference route is then alias-free on the band
  // where the results are compared.
  Field seed_field = random_band_field(321, 4.0, 0.4, 24);
  std::vector<std::complex<double>> emb = seed_field.halfspectrum();
  emb.resize(97, {0.0, 0.0});
  Field f = Field::from_halfspectrum(std::move(emb));
  Field df = derivative(f, 1);
  auto close_fields = [](const Field& a, const Field& b) {
    double scale = 1.0 + sobolev_norm(a, 0.0) + sobolev_norm(b, 0.0);
    return sobolev_norm(a - b, 0.0) <= 1e-11 * scale;
  };

  // kdv5: 5 d(df)^2 - 10 d^2(f df) - d(f^3)
  {
    Field rhs = 5.0 * derivative(pointwise_product(df, df), 1) -
                10.0 * derivative(pointwise_product(f, df), 2) -
                derivative(pointwise_product(pointwise_product(f, f), f), 1);
    CHECK(close_fields(evaluate(preset("kdv5").n, f), rhs));
  }
  // mkdv5: -5 d(f d^2(f^2)) - 6 d(f^5)
  {
    Field f2 = pointwise_product(f, f);
    Field f5 = pointwise_product(pointwise_product(f2, f2), f);
    Field rhs = -5.0 * derivative(pointwise_product(f, derivative(f2, 2)), 1) -
                6.0 * derivative(f5, 1);
    CHECK(close_fields(evaluate(preset("mkdv5").n, f), rhs));
  }
  // benney: f d^3 f + 2 df d^2 f
  {
    Field rhs = pointwise_product(f, derivative(f, 3)) +
                2.0 * pointwise_product(df, derivative(f, 2));
    CHECK(close_fields(evaluate(preset("benney").n, f), rhs));
  }
  // porous2 / porous3: d^2(f^q)
  {
    Field f2 = pointwise_product(f, f);
    CHECK(close_fields(evaluate(preset("porous2").n, f), derivative(f2, 2)));
    Field f3 = pointwise_product(f2, f);
    CHECK(close_fields(evaluate(preset("porous3").n, f), derivative(f3, 2)));
  }
  // plap5 and quartic11 share d((df)^4)
  {
    Field df2 = pointwise_product(df, df);
    Field rhs = derivative(pointwise_product(df2, df2), 1);
    CHECK(close_fields(evaluate(preset("plap5").n, f), rhs));
    CHECK(close_fields(evaluate(preset("quartic11").n, f), rhs));
  }
  // lisher: -1/2 f d^3 f - f^2 d^3 f - (1 + 4f) df d^2 f - (df)^3
  //         - (f + f^2) df
  {
    Field d2f = derivative(f, 2), d3f = derivative(f, 3);
    Field f2 = pointwise_product(f, f);
    Field rhs = -0.5 * pointwise_product(f, d3f) -
                pointwise_product(f2, d3f) -
                pointwise_product(df, d2f) -
                4.0 * pointwise_product(f, pointwise_product(df, d2f)) -
                pointwise_product(pointwise_product(df, df), df) -
                pointwise_product(f, df) - pointwise_product(f2, df);
    CHECK(close_fields(evaluate(preset("lisher").n, f), rhs));
  }
}
