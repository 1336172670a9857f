#include "siegellab/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace siegellab;

TEST_CASE("polynomials are integrated to machine precision") {
  QuadratureConfig cfg;
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, cfg).value ==
        Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  // antiderivative x^3 - x^2 + x/2 evaluated from -1 to 2
  CHECK(integrate([](double x) { return 3.0 * x * x - 2.0 * x + 0.5; }, -1.0,
                  2.0, cfg)
            .value == Catch::Approx(7.5).margin(1e-12));
}

TEST_CASE("smooth transcendental integrands") {
  QuadratureConfig cfg;
  const double pi = std::numbers::pi;
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, pi, cfg).value ==
        Catch::Approx(2.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, cfg)
            .value == Catch::Approx(std::sqrt(pi)).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand forces panel subdivision") {
  QuadratureConfig cfg;
  const IntegrationResult r =
      integrate([](double x) { return std::sin(40.0 * x); }, 0.0, 1.0, cfg);
  CHECK(r.value == Catch::Approx((1.0 - std::cos(40.0)) / 40.0).epsilon(1e-10));
  CHECK(r.panels > 1);
}

TEST_CASE("integrable endpoint singularity converges within tolerance") {
  QuadratureConfig cfg;
  cfg.panel_count = 4096;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-10;
  const IntegrationResult r =
      integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0, cfg);
  CHECK(r.value == Catch::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("degenerate interval integrates to zero") {
  QuadratureConfig cfg;
  CHECK(integrate([](double x) { return std::cos(x); }, 1.5, 1.5, cfg).value ==
        0.0);
}

TEST_CASE("exhausted panel budget reports the partial estimate") {
  QuadratureConfig cfg;
  cfg.panel_count = 8;  // smallest budget validate() accepts
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  bool threw = false;
  try {
    integrate([](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-14); },
              -1.0, 1.0, cfg);
  } catch (const convergence_error& e) {
    threw = true;
    CHECK(std::isfinite(e.estimate()));
    CHECK(e.error_bound() > 0.0);
  }
  CHECK(threw);
}

TEST_CASE("config validation rejects nonsense") {
  QuadratureConfig cfg;
  cfg.panel_count = 0;
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0, 1.0, cfg),
                  precondition_error);
  QuadratureConfig neg;
  neg.abs_tol = -1.0;
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0, 1.0, neg),
                  precondition_error);
}

TEST_CASE("results are deterministic bit for bit") {
  QuadratureConfig cfg;
  const auto f = [](double x) { return std::cos(7.0 * x) / (1.0 + x * x); };
  const double a = integrate(f, 0.0, 5.0, cfg).value;
  const double b = integrate(f, 0.0, 5.0, cfg).value;
  CHECK(a == b);
}
