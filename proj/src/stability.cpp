#include "thinfilm/stability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace thinfilm {

double constant_state_symbol(double ell, const ModelParams& p) {
  p.validate();
  double l2 = ell * ell;
  return -l2 * l2 + (p.M / 4.0 - p.g) * l2;
}

std::pair<double, double> critical_marangoni(double g, double k0) {
  if (!(g > 0.0) || !(k0 > 0.0))
    throw domain_error("critical_marangoni: g and k0 must be positive");
  return {4.0 * g, 4.0 * g + 4.0 * k0 * k0};
}

namespace {

std::mutex diff_cache_mutex;
std::map<std::tuple<int, unsigned long long, int>, Eigen::MatrixXd> diff_cache;

Eigen::MatrixXcd dft_matrices(int n, bool inverse) {
  Eigen::MatrixXcd F(n, n);
  double sign = inverse ? 1.0 : -1.0;
  double scale = inverse ? 1.0 / n : 1.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double ph = sign * 2.0 * std::numbers::pi * k * j / n;
      F(k, j) = scale * std::complex<double>(std::cos(ph), std::sin(ph));
    }
  return F;
}

}  // namespace

Eigen::MatrixXd fourier_diff_matrix(int n, double L, int order) {
  if (n < 4 || n % 2 != 0)
    throw domain_error("fourier_diff_matrix: need even n >= 4");
  if (order < 1 || order > 4)
    throw domain_error("fourier_diff_matrix: order out of range");
  if (!(L > 0.0)) throw domain_error("fourier_diff_matrix: L must be positive");

  auto key = std::make_tuple(n, std::bit_cast<unsigned long long>(L), order);
  {
    std::lock_guard<std::mutex> lock(diff_cache_mutex);
    auto it = diff_cache.find(key);
    if (it != diff_cache.end()) return it->second;
  }

  Eigen::MatrixXcd F = dft_matrices(n, false);
  Eigen::MatrixXcd Fi = dft_matrices(n, true);
  Eigen::VectorXcd mult(n);
  for (int k = 0; k < n; ++k) {
    int m = k <= n / 2 ? k : k - n;
    double kappa = 2.0 * std::numbers::pi * m / L;
    std::complex<double> ik(0.0, kappa);
    std::complex<double> mu = std::pow(ik, order);
    if (k == n / 2 && order % 2 == 1) mu = 0.0;  // Nyquist has no odd derivative
    mult(k) = mu;
  }
  Eigen::MatrixXd D = (Fi * mult.asDiagonal() * F).real();

  std::lock_guard<std::mutex> lock(diff_cache_mutex);
  return diff_cache.emplace(key, std::move(D)).first->second;
}

Eigen::MatrixXd periodic_state_operator(const PeriodicProfile& v, double M,
                                        double g, int n) {
  double L = v.period();
  auto x = PeriodicProfile::grid(v.k0(), n);
  Eigen::VectorXd A(n), B(n), C(n);
  for (int j = 0; j < n; ++j) {
    double h = 1.0 + v.eval(x[j]);
    if (!(h > 0.0))
      throw domain_error("periodic_state_operator: thickness not positive");
    double hx = v.deriv(x[j], 1);
    double hxxx = v.deriv(x[j], 3);
    double u1 = 1.0 + h;
    A(j) = h * h * h;
    B(j) = -g * h * h * h + M * h * h / (u1 * u1);
    C(j) = 3.0 * h * h * (hxxx - g * hx) + 2.0 * M * h * hx / (u1 * u1 * u1);
  }
  const Eigen::MatrixXd& D1 = fourier_diff_matrix(n, L, 1);
  const Eigen::MatrixXd& D3 = fourier_diff_matrix(n, L, 3);
  Eigen::MatrixXd inner = A.asDiagonal() * D3;
  inner += B.asDiagonal() * D1;
  inner += Eigen::MatrixXd(C.asDiagonal());
  return -(D1 * inner);
}

namespace {

std::vector<std::complex<double>> sort_desc(
    std::vector<std::complex<double>> ev, int n_eigs) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  if (n_eigs > 0 && n_eigs < static_cast<int>(ev.size())) ev.resize(n_eigs);
  return ev;
}

int spectrum_grid(int modes) {
  return std::min(512, std::max(256, 2 * modes));
}

void check_resolution(const PeriodicProfile& prof) {
  const auto& c = prof.coeffs();
  int N = static_cast<int>(c.size());
  double total = 0.0, tail = 0.0;
  int cut = (7 * N) / 8;
  for (int l = 0; l < N; ++l) {
    total += c[l] * c[l];
    if (l >= cut) tail += c[l] * c[l];
  }
  if (total > 0.0 && tail / total > 1e-8)
    throw numerical_error(
        "periodic_state_spectrum: profile under-resolved (trailing-mode "
        "energy too large)");
}

}  // namespace

SpectrumReport constant_state_spectrum(const ModelParams& p, int n_modes) {
  p.validate();
  if (n_modes < 1)
    throw domain_error("constant_state_spectrum: n_modes must be positive");
  SpectrumReport rep;
  rep.base_state = "constant";
  std::vector<std::complex<double>> ev;
  for (int m = 0; m <= n_modes; ++m)
    ev.emplace_back(constant_state_symbol(m * p.k0, p), 0.0);
  rep.eigenvalues = sort_desc(std::move(ev), 0);
  rep.leading = rep.eigenvalues.front().real();
  if (p.M > 4.0 * p.g) {
    rep.unstable_band_lo = 0.0;
    rep.unstable_band_hi = std::sqrt(p.M / 4.0 - p.g);
  }
  return rep;
}

SpectrumReport periodic_state_spectrum(const BranchPoint& bp, double g,
                                       int n_eigs) {
  if (!(bp.min_h > 0.05))
    throw domain_error(
        "periodic_state_spectrum: profile too close to rupture for the dense "
        "solver");
  check_resolution(bp.profile);
  int n = spectrum_grid(bp.profile.modes());
  Eigen::MatrixXd op = periodic_state_operator(bp.profile, bp.M, g, n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(op, false);
  if (es.info() != Eigen::Success)
    throw numerical_error("periodic_state_spectrum: eigensolver failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + n);
  SpectrumReport rep;
  rep.base_state = "branch-point";
  rep.eigenvalues = sort_desc(std::move(ev), n_eigs);
  rep.leading = rep.eigenvalues.front().real();
  return rep;
}

std::vector<std::complex<double>> bloch_spectrum(const BranchPoint& bp,
                                                 double g, double xi,
                                                 int n_eigs) {
  if (!(bp.min_h > 0.05))
    throw domain_error("bloch_spectrum: profile too close to rupture");
  check_resolution(bp.profile);
  const auto& prof = bp.profile;
  int n = spectrum_grid(prof.modes());
  double L = prof.period();
  auto x = PeriodicProfile::grid(prof.k0(), n);

  Eigen::VectorXd A(n), B(n), C(n);
  for (int j = 0; j < n; ++j) {
    double h = 1.0 + prof.eval(x[j]);
    double hx = prof.deriv(x[j], 1);
    double hxxx = prof.deriv(x[j], 3);
    double u1 = 1.0 + h;
    A(j) = h * h * h;
    B(j) = -g * h * h * h + bp.M * h * h / (u1 * u1);
    C(j) = 3.0 * h * h * (hxxx - g * hx) + 2.0 * bp.M * h * hx / (u1 * u1 * u1);
  }

  Eigen::MatrixXcd F = dft_matrices(n, false);
  Eigen::MatrixXcd Fi = dft_matrices(n, true);
  auto shifted = [&](int order) {
    Eigen::VectorXcd mult(n);
    for (int k = 0; k < n; ++k) {
      int m = k <= n / 2 ? k : k - n;
      double kappa = 2.0 * std::numbers::pi * m / L + xi;
      std::complex<double> ik(0.0, kappa);
      std::complex<double> mu = std::pow(ik, order);
      if (xi == 0.0 && k == n / 2 && order % 2 == 1) mu = 0.0;
      mult(k) = mu;
    }
    return Eigen::MatrixXcd(Fi * mult.asDiagonal() * F);
  };
  Eigen::MatrixXcd D1 = shifted(1), D3 = shifted(3);
  Eigen::MatrixXcd inner = A.asDiagonal() * D3;
  inner += B.asDiagonal() * D1;
  inner += Eigen::MatrixXcd(C.cast<std::complex<double>>().asDiagonal());
  Eigen::MatrixXcd op = -(D1 * inner);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op, false);
  if (es.info() != Eigen::Success)
    throw numerical_error("bloch_spectrum: eigensolver failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + n);
  return sort_desc(std::move(ev), n_eigs);
}

std::pair<double, double> translation_mode_check(const BranchPoint& bp,
                                                 double g) {
  if (!(bp.min_h > 0.05))
    throw domain_error("translation_mode_check: profile too close to rupture");
  int n = spectrum_grid(bp.profile.modes());
  Eigen::MatrixXd op = periodic_state_operator(bp.profile, bp.M, g, n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(op, false);
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    min_abs = std::min(min_abs, std::abs(es.eigenvalues()(i)));

  auto x = PeriodicProfile::grid(bp.profile.k0(), n);
  Eigen::VectorXd hx(n);
  for (int j = 0; j < n; ++j) hx(j) = bp.profile.deriv(x[j], 1);
  double rel = (op * hx).norm() /
               (op.cwiseAbs().rowwise().sum().maxCoeff() * hx.norm());
  return {min_abs, rel};
}

void fill_leading_eigenvalues(BranchRecord& rec) {
  for (auto& p : rec.points) {
    if (!(p.min_h > 0.05)) continue;
    try {
      p.leading_eig = periodic_state_spectrum(p, rec.g, 1).leading;
    } catch (const numerical_error&) {
      // leave the placeholder when the profile cannot be resolved
    }
  }
}

}  // namespace thinfilm
