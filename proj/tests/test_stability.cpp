#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "thinfilm/continuation.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/stability.hpp"

using namespace thinfilm;

namespace {
constexpr double pi = std::numbers::pi;

double nearest_eig_gap(const std::vector<std::complex<double>>& ev,
                       double target) {
  double best = 1e300;
  for (const auto& z : ev)
    best = std::min(best, std::abs(z - std::complex<double>(target, 0.0)));
  return best;
}
}  // namespace

TEST_CASE("constant-state symbol anchors") {
  CHECK(constant_state_symbol(1.0, ModelParams{1.0, 8.5, 1.0}) == 0.125);
  CHECK(constant_state_symbol(2.0, ModelParams{1.0, 8.0, 1.0}) == -12.0);
  CHECK(constant_state_symbol(0.0, ModelParams{1.0, 6.0, 1.0}) == 0.0);

  ModelParams q{1.0, 8.0, 1.0};
  double lpeak = 1.0 / std::sqrt(2.0);
  CHECK(constant_state_symbol(lpeak, q) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(constant_state_symbol(1.01 * lpeak, q) < 0.25);
  CHECK(constant_state_symbol(0.99 * lpeak, q) < 0.25);

  ModelParams stable{1.0, 4.0, 1.0};
  for (int i = 0; i <= 30; ++i)
    CHECK(constant_state_symbol(0.1 * i, stable) <= 0.0);
}

TEST_CASE("critical Marangoni thresholds") {
  auto [m4, m8] = critical_marangoni(1.0, 1.0);
  CHECK(m4 == 4.0);
  CHECK(m8 == 8.0);
  auto [ma, mb] = critical_marangoni(2.0, 0.5);
  CHECK(ma == 8.0);
  CHECK(mb == 9.0);
  CHECK_THROWS_AS(critical_marangoni(0.0, 1.0), domain_error);
  CHECK_THROWS_AS(critical_marangoni(1.0, -1.0), domain_error);

  double g = 1.3, k0 = 0.7;
  auto [m_flat, m_k0] = critical_marangoni(g, k0);
  CHECK(std::abs(constant_state_symbol(k0, ModelParams{g, m_k0, k0})) < 1e-14);
  CHECK(m_flat == 4.0 * g);
}

TEST_CASE("fourier differentiation matrices act exactly on resolved cosines") {
  int n = 32;
  double L = 2.0 * pi;
  auto x = PeriodicProfile::grid(1.0, n);
  Eigen::VectorXd u(n);
  for (int j = 0; j < n; ++j) u(j) = std::cos(3.0 * x[j]);

  Eigen::VectorXd d1 = fourier_diff_matrix(n, L, 1) * u;
  Eigen::VectorXd d2 = fourier_diff_matrix(n, L, 2) * u;
  Eigen::VectorXd d4 = fourier_diff_matrix(n, L, 4) * u;
  for (int j = 0; j < n; ++j) {
    CHECK(std::abs(d1(j) + 3.0 * std::sin(3.0 * x[j])) < 1e-10);
    CHECK(std::abs(d2(j) + 9.0 * u(j)) < 1e-10);
    CHECK(std::abs(d4(j) - 81.0 * u(j)) < 1e-9);
  }

  CHECK_THROWS_AS(fourier_diff_matrix(31, L, 1), domain_error);
  CHECK_THROWS_AS(fourier_diff_matrix(2, L, 1), domain_error);
  CHECK_THROWS_AS(fourier_diff_matrix(n, L, 0), domain_error);
  CHECK_THROWS_AS(fourier_diff_matrix(n, L, 5), domain_error);
  CHECK_THROWS_AS(fourier_diff_matrix(n, -1.0, 1), domain_error);
}

TEST_CASE("constant-state spectrum samples the symbol") {
  SpectrumReport rep = constant_state_spectrum(ModelParams{1.0, 8.5, 1.0}, 8);
  CHECK(rep.base_state == "constant");
  CHECK(rep.leading == 0.125);
  CHECK(rep.eigenvalues.size() == 9);
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i)
    CHECK(rep.eigenvalues[i - 1].real() >= rep.eigenvalues[i].real());
  CHECK(nearest_eig_gap(rep.eigenvalues, 0.0) == 0.0);
  CHECK(rep.unstable_band_lo == 0.0);
  CHECK(rep.unstable_band_hi == doctest::Approx(std::sqrt(1.125)).epsilon(1e-14));

  SpectrumReport flat = constant_state_spectrum(ModelParams{1.0, 4.0, 1.0}, 6);
  CHECK(flat.leading == 0.0);
  CHECK(flat.unstable_band_hi == 0.0);
  CHECK_THROWS_AS(constant_state_spectrum(ModelParams{1.0, 8.0, 1.0}, 0),
                  domain_error);
}

TEST_CASE("periodic operator at the trivial profile recovers the symbol") {
  PeriodicProfile z(1.0, {0.0});
  Eigen::MatrixXd op = periodic_state_operator(z, 8.5, 1.0, 64);
  Eigen::EigenSolver<Eigen::MatrixXd> es(op, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + 64);
  ModelParams p{1.0, 8.5, 1.0};
  for (int m = 0; m <= 4; ++m)
    CHECK(nearest_eig_gap(ev, constant_state_symbol(m, p)) < 1e-8);
}

TEST_CASE("small periodic states are co-periodically unstable") {
  Continuation cont{ContinuationSettings{}};
  BranchPoint bp = cont.solve_pinned(0.05);
  SpectrumReport rep = periodic_state_spectrum(bp, 1.0, 8);
  CHECK(rep.base_state == "branch-point");
  CHECK(rep.leading > 0.0);
  CHECK(static_cast<int>(rep.eigenvalues.size()) == 8);
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i)
    CHECK(rep.eigenvalues[i - 1].real() >= rep.eigenvalues[i].real());

  auto [near_zero, action] = translation_mode_check(bp, 1.0);
  CHECK(action < 1e-8);
  CHECK(near_zero < 1e-3);
}

TEST_CASE("bloch fiber at zero transverse wavenumber matches the co-periodic set") {
  Continuation cont{ContinuationSettings{}};
  BranchPoint bp = cont.solve_pinned(0.1);
  SpectrumReport rep = periodic_state_spectrum(bp, 1.0, 4);
  auto bl = bloch_spectrum(bp, 1.0, 0.0, 4);
  REQUIRE(bl.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(bl[i].real() - rep.eigenvalues[i].real()) < 1e-6);

  auto half = bloch_spectrum(bp, 1.0, 0.5, 4);
  REQUIRE(half.size() == 4);
  for (std::size_t i = 1; i < half.size(); ++i)
    CHECK(half[i - 1].real() >= half[i].real());
  for (const auto& z : half) CHECK(std::isfinite(z.real()));
}

TEST_CASE("spectrum preconditions reject unusable branch points") {
  BranchPoint thin;
  thin.profile = PeriodicProfile(1.0, {0.97});
  thin.M = 7.0;
  thin.min_h = 0.03;
  CHECK_THROWS_AS(periodic_state_spectrum(thin, 1.0, 4), domain_error);
  CHECK_THROWS_AS(bloch_spectrum(thin, 1.0, 0.0, 4), domain_error);
  CHECK_THROWS_AS(translation_mode_check(thin, 1.0), domain_error);

  BranchPoint rough;
  std::vector<double> c(64);
  for (int l = 0; l < 64; ++l) c[l] = 0.1 / (l + 1.0);
  rough.profile = PeriodicProfile(1.0, c);
  rough.M = 7.5;
  rough.min_h = 0.5;
  CHECK_THROWS_AS(periodic_state_spectrum(rough, 1.0, 4), numerical_error);
  CHECK_THROWS_AS(bloch_spectrum(rough, 1.0, 0.0, 4), numerical_error);
}

TEST_CASE("branch records pick up leading eigenvalues") {
  ContinuationSettings st;
  st.max_steps = 4;
  BranchRecord rec = Continuation{st}.run();
  fill_leading_eigenvalues(rec);
  for (const auto& p : rec.points) {
    CHECK(std::isfinite(p.leading_eig));
    CHECK(p.leading_eig > 0.0);
  }
}
