#pragma once

#include <functional>
#include <string>
#include <vector>

namespace thinfilm {

struct RootOptions {
  double residual_tol = 1e-13;
  int max_iter = 200;
};

// root of f on a sign-changing bracket [a, b]: bisection with Newton polish
// when df is supplied, plain bisection otherwise
double find_root(const std::function<double(double)>& f, double a, double b,
                 const std::function<double(double)>& df = nullptr,
                 RootOptions opts = {});

// Gauss-Legendre nodes and weights on (-1, 1)
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// least-squares line y ~ a + b x, returns {a, b}
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

// shortest round-tripping decimal form, 17 significant digits
std::string format_g17(double x);

}  // namespace thinfilm
