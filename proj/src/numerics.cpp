#include "thinfilm/numerics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "thinfilm/errors.hpp"

namespace thinfilm {

double find_root(const std::function<double(double)>& f, double a, double b,
                 const std::function<double(double)>& df, RootOptions opts) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb))
    throw domain_error("find_root: no sign change on bracket");

  double x = 0.5 * (a + b);
  for (int it = 0; it < opts.max_iter; ++it) {
    double fx = f(x);
    if (std::abs(fx) < opts.residual_tol) return x;
    if (std::signbit(fx) == std::signbit(fa)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    double next = 0.5 * (a + b);
    if (df) {
      double d = df(x);
      if (d != 0.0) {
        double xn = x - fx / d;
        if (xn > a && xn < b) next = xn;
      }
    }
    if (next == x) return x;  // bracket collapsed to machine precision
    x = next;
  }
  if (std::abs(f(x)) < 1e3 * opts.residual_tol) return x;
  throw numerical_error("find_root: residual tolerance not reached");
}

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw domain_error("GaussLegendre: n must be positive");
  // Golub-Welsch: eigen-decompose the Jacobi matrix of the Legendre weight
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v0 * v0;
  }
}

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw domain_error("fit_line: need matching vectors with >= 2 points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw numerical_error("fit_line: degenerate abscissae");
  double b = (n * sxy - sx * sy) / denom;
  double a = (sy - b * sx) / n;
  return {a, b};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_line(x, y).second;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace thinfilm
