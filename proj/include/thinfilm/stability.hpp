#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "thinfilm/continuation.hpp"

namespace thinfilm {

// dispersion relation of the constant film: -ell^4 + (M/4 - g) ell^2
double constant_state_symbol(double ell, const ModelParams& p);

// (M*, M*(k0)) = (4g, 4g + 4 k0^2)
std::pair<double, double> critical_marangoni(double g, double k0);

struct SpectrumReport {
  std::string base_state;
  std::vector<std::complex<double>> eigenvalues;  // descending real part
  double leading = 0.0;
  double unstable_band_lo = 0.0;
  double unstable_band_hi = 0.0;
};

// full-period Fourier differentiation matrix of the given order on n points
Eigen::MatrixXd fourier_diff_matrix(int n, double L, int order);

// linearization about h = 1 + v: u -> -(A u_xxx + B u_x + C u)_x with
// A = h^3, B = -g h^3 + M h^2/(1+h)^2, C = 3 h^2 (h_xxx - g h_x)
//                                          + 2 M h h_x/(1+h)^3
Eigen::MatrixXd periodic_state_operator(const PeriodicProfile& v, double M,
                                        double g, int n);

SpectrumReport constant_state_spectrum(const ModelParams& p, int n_modes);
SpectrumReport periodic_state_spectrum(const BranchPoint& bp, double g,
                                       int n_eigs);

// spectrum of the Bloch fiber at transverse wavenumber xi
std::vector<std::complex<double>> bloch_spectrum(const BranchPoint& bp,
                                                 double g, double xi,
                                                 int n_eigs);

// eigenvalue closest to zero and the alignment of its eigenvector with h_x
std::pair<double, double> translation_mode_check(const BranchPoint& bp,
                                                 double g);

void fill_leading_eigenvalues(BranchRecord& rec);

}  // namespace thinfilm
