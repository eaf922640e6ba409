#pragma once

#include <cmath>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

// K0 = omega(0) = 1/2 + log(1/2), the mass constant of the trivial state
inline const double K0 = 0.5 + std::log(0.5);

struct ModelParams {
  double g = 1.0;
  double M = 8.0;
  double k0 = 1.0;

  double M_star() const { return 4.0 * g; }
  double M_star_k0() const { return 4.0 * g + 4.0 * k0 * k0; }
  void validate() const;
};

struct HamiltonianParams {
  double g = 1.0;
  double M = 8.0;
  double K = K0;

  void validate() const;
};

// truncated even cosine series v(x) = sum_{l=1}^{N} a_l cos(l k0 x),
// mean-zero and even by construction
class PeriodicProfile {
 public:
  PeriodicProfile() = default;
  PeriodicProfile(double k0, std::vector<double> coeffs);

  double k0() const { return k0_; }
  int modes() const { return static_cast<int>(a_.size()); }
  const std::vector<double>& coeffs() const { return a_; }
  double period() const;

  double eval(double x) const;
  double deriv(double x, int order) const;

  // n uniform samples of v on [-pi/k0, pi/k0)
  std::vector<double> sample(int n) const;
  static std::vector<double> grid(double k0, int n);

  double max_abs_coeff() const;

 private:
  double k0_ = 1.0;
  std::vector<double> a_;
};

// omega(v) = 1/(2+v) + log((1+v)/(2+v))
double omega(double v);
double omega_prime(double v);

// K(v) = average of omega(v(x)) over one period, trapezoid quadrature
double mass_constant_K(const PeriodicProfile& v);

// H(v, w) = w^2/2 - g v^2/2 + M (1+v) log((1+v)/(2+v)) - M K v,
// with the continuous extension (1+v) log(.) -> 0 at v = -1
double hamiltonian(double v, double w, const HamiltonianParams& p);

// G(v) = H(v, 0) and derivatives; order in {0, 1, 2}
double potential_G(double v, const HamiltonianParams& p, int order = 0);

// pointwise stationary flux h^3 (h_xxx - g h_x) + M h^2/(1+h)^2 h_x
std::vector<double> stationary_flux(const std::vector<double>& h,
                                    const std::vector<double>& dx1_h,
                                    const std::vector<double>& dx3_h,
                                    const ModelParams& p);

}  // namespace thinfilm
