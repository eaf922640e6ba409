#include "thinfilm/model.hpp"

#include <algorithm>
#include <numbers>

namespace thinfilm {

namespace {

// (1+v) log((1+v)/(2+v)) with the continuous extension 0 at v = -1
double entropy_term(double v) {
  double u = 1.0 + v;
  if (u < 1e-300) return 0.0;
  return u * std::log(u / (2.0 + v));
}

}  // namespace

void ModelParams::validate() const {
  if (!(g > 0.0)) throw domain_error("ModelParams: g must be positive");
  if (!(M > 0.0)) throw domain_error("ModelParams: M must be positive");
  if (!(k0 > 0.0)) throw domain_error("ModelParams: k0 must be positive");
}

void HamiltonianParams::validate() const {
  if (!(g > 0.0)) throw domain_error("HamiltonianParams: g must be positive");
  if (!(M > 0.0)) throw domain_error("HamiltonianParams: M must be positive");
  if (!(K <= K0 + 1e-14))
    throw domain_error("HamiltonianParams: K must not exceed K0");
}

PeriodicProfile::PeriodicProfile(double k0, std::vector<double> coeffs)
    : k0_(k0), a_(std::move(coeffs)) {
  if (!(k0 > 0.0)) throw domain_error("PeriodicProfile: k0 must be positive");
  if (a_.empty()) throw domain_error("PeriodicProfile: empty coefficients");
}

double PeriodicProfile::period() const { return 2.0 * std::numbers::pi / k0_; }

double PeriodicProfile::eval(double x) const { return deriv(x, 0); }

double PeriodicProfile::deriv(double x, int order) const {
  if (order < 0 || order > 4)
    throw domain_error("PeriodicProfile: derivative order out of range");
  double s = 0.0;
  for (size_t i = 0; i < a_.size(); ++i) {
    double lam = (static_cast<double>(i) + 1.0) * k0_;
    double phase = lam * x;
    double basis;
    switch (order % 4) {
      case 0: basis = std::cos(phase); break;
      case 1: basis = -std::sin(phase); break;
      case 2: basis = -std::cos(phase); break;
      default: basis = std::sin(phase); break;
    }
    s += a_[i] * std::pow(lam, order) * basis;
  }
  return s;
}

std::vector<double> PeriodicProfile::grid(double k0, int n) {
  if (n < 1) throw domain_error("PeriodicProfile: grid size must be positive");
  double L = 2.0 * std::numbers::pi / k0;
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = -0.5 * L + L * j / n;
  return x;
}

std::vector<double> PeriodicProfile::sample(int n) const {
  auto x = grid(k0_, n);
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) v[j] = eval(x[j]);
  return v;
}

double PeriodicProfile::max_abs_coeff() const {
  double m = 0.0;
  for (double c : a_) m = std::max(m, std::abs(c));
  return m;
}

double omega(double v) {
  if (!(v > -1.0)) throw domain_error("omega: v must exceed -1");
  return 1.0 / (2.0 + v) + std::log((1.0 + v) / (2.0 + v));
}

double omega_prime(double v) {
  if (!(v > -1.0)) throw domain_error("omega_prime: v must exceed -1");
  double u2 = 2.0 + v;
  return 1.0 / ((1.0 + v) * u2 * u2);
}

double mass_constant_K(const PeriodicProfile& v) {
  int n = std::max(64, 8 * v.modes());
  auto vals = v.sample(n);
  double s = 0.0;
  for (double vj : vals) {
    if (!(vj > -1.0))
      throw domain_error("mass_constant_K: film thickness not positive");
    s += omega(vj);
  }
  return s / n;
}

double hamiltonian(double v, double w, const HamiltonianParams& p) {
  if (v < -1.0) throw domain_error("hamiltonian: v must be >= -1");
  return 0.5 * w * w - 0.5 * p.g * v * v + p.M * entropy_term(v) - p.M * p.K * v;
}

double potential_G(double v, const HamiltonianParams& p, int order) {
  if (!(v > -1.0)) throw domain_error("potential_G: v must exceed -1");
  switch (order) {
    case 0:
      return -0.5 * p.g * v * v + p.M * entropy_term(v) - p.M * p.K * v;
    case 1:
      return -p.g * v + p.M * (omega(v) - p.K);
    case 2:
      return -p.g + p.M * omega_prime(v);
    default:
      throw domain_error("potential_G: order must be 0, 1 or 2");
  }
}

std::vector<double> stationary_flux(const std::vector<double>& h,
                                    const std::vector<double>& dx1_h,
                                    const std::vector<double>& dx3_h,
                                    const ModelParams& p) {
  if (h.size() != dx1_h.size() || h.size() != dx3_h.size())
    throw domain_error("stationary_flux: mismatched sample vectors");
  std::vector<double> q(h.size());
  for (size_t j = 0; j < h.size(); ++j) {
    double hj = h[j];
    if (!(hj > 0.0))
      throw domain_error("stationary_flux: film thickness not positive");
    double mob = hj * hj / ((1.0 + hj) * (1.0 + hj));
    q[j] = hj * hj * hj * (dx3_h[j] - p.g * dx1_h[j]) + p.M * mob * dx1_h[j];
  }
  return q;
}

}  // namespace thinfilm
