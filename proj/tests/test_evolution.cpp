#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "thinfilm/errors.hpp"
#include "thinfilm/evolution.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/numerics.hpp"

using namespace thinfilm;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<double> cosine_state(int n, double L, double mean, double amp,
                                 int ell) {
  std::vector<double> h(n);
  for (int j = 0; j < n; ++j) {
    double x = -0.5 * L + L * j / n;
    h[j] = mean + amp * std::cos(2.0 * pi * ell * x / L);
  }
  return h;
}
}  // namespace

TEST_CASE("stepper construction and argument validation") {
  ModelParams p{1.0, 8.0, 1.0};
  CHECK_THROWS_AS(ThinFilmStepper(p, 15, 2.0 * pi), domain_error);
  CHECK_THROWS_AS(ThinFilmStepper(p, 14, 2.0 * pi), domain_error);
  CHECK_THROWS_AS(ThinFilmStepper(p, 32, -1.0), domain_error);
  CHECK_THROWS_AS(ThinFilmStepper(ModelParams{-1.0, 8.0, 1.0}, 32, 2.0 * pi),
                  domain_error);

  ThinFilmStepper stp(p, 32, 2.0 * pi);
  CHECK(stp.n() == 32);
  CHECK(stp.L() == 2.0 * pi);
  auto s = stp.make_state(cosine_state(32, 2.0 * pi, 1.0, 0.1, 1));
  CHECK_THROWS_AS(stp.step(s, 0.0), domain_error);
  CHECK_THROWS_AS(stp.make_state(std::vector<double>(16, 1.0)), domain_error);
  CHECK_THROWS_AS(stp.mode_amplitude(s.h, -1), domain_error);
  CHECK_THROWS_AS(stp.mode_amplitude(s.h, 17), domain_error);
}

TEST_CASE("cfl limit matches the frozen-coefficient bound") {
  ThinFilmStepper stp(ModelParams{1.0, 8.0, 1.0}, 32, 2.0 * pi);
  std::vector<double> flat(32, 1.0);
  CHECK(stp.cfl_dt(flat) == doctest::Approx(0.8 / 256.0).epsilon(1e-12));

  auto s = stp.make_state(flat);
  s.h[0] += 1e-9;
  stp.step(s, 1.0);
  CHECK(s.dt == doctest::Approx(stp.cfl_dt(s.h)).epsilon(1e-6));
}

TEST_CASE("mode amplitudes read cosine content exactly") {
  ThinFilmStepper stp(ModelParams{1.0, 8.0, 1.0}, 64, 2.0 * pi);
  auto h = cosine_state(64, 2.0 * pi, 1.0, 0.1, 1);
  CHECK(stp.mode_amplitude(h, 1) == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(stp.mode_amplitude(h, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(stp.mode_amplitude(h, 2) < 1e-15);
}

TEST_CASE("mass is conserved to round-off over many steps") {
  ThinFilmStepper stp(ModelParams{1.0, 8.5, 1.0}, 64, 2.0 * pi);
  auto s = stp.make_state(cosine_state(64, 2.0 * pi, 1.0, 0.3, 1));
  double mass0 = s.mass;
  CHECK(mass0 == doctest::Approx(2.0 * pi).epsilon(1e-13));
  for (int i = 0; i < 1000; ++i) stp.step(s, 1e-4);
  CHECK(std::abs(s.mass - mass0) / mass0 < 1e-12);
  CHECK_FALSE(s.hit_floor);
  CHECK(s.t > 0.0);
}

TEST_CASE("near-flat films decay at the exact linear rate") {
  ThinFilmStepper stp(ModelParams{1.0, 8.0, 1.0}, 256, 2.0 * pi);
  auto s = stp.make_state(cosine_state(256, 2.0 * pi, 1.0, 1e-8, 2));
  double a0 = stp.mode_amplitude(s.h, 2);
  for (int i = 0; i < 1000; ++i) stp.step(s, 1e-5);
  double a1 = stp.mode_amplitude(s.h, 2);
  CHECK(a1 / a0 == doctest::Approx(std::exp(-12.0 * s.t)).epsilon(1e-3));
}

TEST_CASE("the height floor freezes the state") {
  ThinFilmStepper stp(ModelParams{1.0, 8.0, 1.0}, 64, 2.0 * pi);
  auto s = stp.make_state(cosine_state(64, 2.0 * pi, 1.0, 0.99995, 1));
  CHECK(s.hit_floor);
  double t0 = s.t;
  stp.step(s, 1e-4);
  CHECK(s.t == t0);
}

TEST_CASE("measured decay rate matches the dispersion relation") {
  ModelParams p{1.0, 8.0, 1.0};
  double r = measure_growth_rate(2, 8.0, p);
  CHECK(r == doctest::Approx(-12.0).epsilon(0.02));
}

TEST_CASE("growth-rate fit reports an unusable window") {
  ModelParams p{1.0, 8.0, 1.0};
  CHECK_THROWS_AS(measure_growth_rate(12, 8.0, p), numerical_error);
  CHECK_THROWS_AS(measure_growth_rate(0, 8.0, p), domain_error);
  CHECK_THROWS_AS(measure_growth_rate(128, 8.0, p), domain_error);
}

TEST_CASE("amplitude-equation stepper validation and second derivative") {
  CHECK_THROWS_AS(SivashinskyStepper(0.0, 64, 2.0 * pi), domain_error);
  CHECK_THROWS_AS(SivashinskyStepper(1.0, 13, 2.0 * pi), domain_error);
  CHECK_THROWS_AS(SivashinskyStepper(1.0, 64, 0.0), domain_error);

  SivashinskyStepper stp(1.0, 64, 2.0 * pi);
  std::vector<double> V = cosine_state(64, 2.0 * pi, 0.0, 1.0, 3);
  CHECK_THROWS_AS(stp.step(V, 0.0), domain_error);
  CHECK_THROWS_AS(stp.step(V, 2.5), domain_error);
  std::vector<double> wrong(32, 0.0);
  CHECK_THROWS_AS(stp.step(wrong, 1e-3), domain_error);

  auto Vxx = stp.second_derivative(V);
  for (int j = 0; j < 64; ++j) CHECK(std::abs(Vxx[j] + 9.0 * V[j]) < 1e-10);
}

TEST_CASE("amplitude equation decays small data below the instability scale") {
  int n = 32;
  double L = pi;
  SivashinskyStepper stp(1.0, n, L);
  double A = 1e-3;
  std::vector<double> V = cosine_state(n, L, 0.0, A, 1);

  std::vector<std::vector<double>> snaps{V};
  double dt = 1e-5, dT = 0.01;
  int per = static_cast<int>(std::lround(dT / dt));
  for (int sidx = 0; sidx < 50; ++sidx) {
    for (int i = 0; i < per; ++i) REQUIRE(stp.step(V, dt));
    snaps.push_back(V);
  }
  double vmax = 0.0;
  for (double v : V) vmax = std::max(vmax, std::abs(v));
  CHECK(vmax < A * std::exp(-12.0 * 0.5) * 1.05);

  // cos(2X) seed: integral of ||V_XX||_inf^2 = A^2 16 (1 - e^{-24 T}) / 24
  double target = A * A * 16.0 / 24.0 * (1.0 - std::exp(-24.0 * 0.5));
  CHECK(blowup_indicator(snaps, dT, L) == doctest::Approx(target).epsilon(0.02));

  CHECK_THROWS_AS(blowup_indicator({}, dT, L), domain_error);
  CHECK_THROWS_AS(blowup_indicator(snaps, -1.0, L), domain_error);
  snaps.push_back(std::vector<double>(16, 0.0));
  CHECK_THROWS_AS(blowup_indicator(snaps, dT, L), domain_error);
}

TEST_CASE("large amplitude data trips the blow-up guard in finite time") {
  int n = 64;
  double L = 2.0 * pi;
  SivashinskyStepper stp(1.0, n, L);
  std::vector<double> V = cosine_state(n, L, 0.0, 1.5, 1);
  bool alive = true;
  double t = 0.0;
  for (int i = 0; i < 40000 && alive; ++i) {
    alive = stp.step(V, 1e-4);
    t += 1e-4;
  }
  CHECK_FALSE(alive);
  CHECK(t < 2.0);
}

TEST_CASE("ansatz residual shrinks superlinearly in eps") {
  std::vector<double> le, lr;
  for (double eps : {0.05, 0.1, 0.2}) {
    le.push_back(std::log(eps));
    lr.push_back(std::log(ansatz_residual_ratio(eps, 1.0)));
  }
  CHECK(fit_slope(le, lr) > 1.5);
}

TEST_CASE("amplitude correspondence rejects out-of-range scalings") {
  CHECK_THROWS_AS(amplitude_correspondence(0.4, 1.0), domain_error);
  CHECK_THROWS_AS(amplitude_correspondence(0.0, 1.0), domain_error);
  CHECK_THROWS_AS(amplitude_correspondence(0.1, -1.0), domain_error);
  CHECK_THROWS_AS(ansatz_residual_ratio(0.5, 1.0), domain_error);
}
