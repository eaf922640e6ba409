#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "thinfilm/errors.hpp"
#include "thinfilm/numerics.hpp"

using namespace thinfilm;

TEST_CASE("find_root locates sqrt(2) on a bracket") {
  auto f = [](double x) { return x * x - 2.0; };
  double r = find_root(f, 0.0, 2.0);
  CHECK(std::abs(r - std::sqrt(2.0)) < 1e-12);

  auto df = [](double x) { return 2.0 * x; };
  double rn = find_root(f, 0.0, 2.0, df);
  CHECK(std::abs(rn - std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("find_root rejects a bracket without sign change") {
  auto f = [](double x) { return x * x + 1.0; };
  CHECK_THROWS_AS(find_root(f, -1.0, 1.0), domain_error);
}

TEST_CASE("gauss nodes integrate high-degree polynomials exactly") {
  GaussLegendre q(5);
  REQUIRE(q.nodes.size() == 5);
  double s0 = 0.0, s8 = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    s0 += q.weights[i];
    s8 += q.weights[i] * std::pow(q.nodes[i], 8);
  }
  CHECK(std::abs(s0 - 2.0) < 1e-14);
  CHECK(std::abs(s8 - 2.0 / 9.0) < 1e-14);
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    CHECK(std::abs(q.nodes[i] + q.nodes[q.nodes.size() - 1 - i]) < 1e-14);
}

TEST_CASE("gauss quadrature reproduces a smooth integral") {
  GaussLegendre q(200);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    s += q.weights[i] * std::exp(q.nodes[i]);
  CHECK(std::abs(s - (std::exp(1.0) - std::exp(-1.0))) < 1e-13);
}

TEST_CASE("line fit recovers slope and intercept") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.0, 5.0, 7.0};
  auto [a, b] = fit_line(x, y);
  CHECK(std::abs(a - 1.0) < 1e-13);
  CHECK(std::abs(b - 2.0) < 1e-13);
  CHECK(std::abs(fit_slope(x, y) - 2.0) < 1e-13);
}

TEST_CASE("g17 formatting round-trips doubles") {
  for (double x : {1.0 / 3.0, -2.718281828459045e-300, 0.0, 1e17,
                   std::numbers::pi, -7.25}) {
    std::string s = format_g17(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}
