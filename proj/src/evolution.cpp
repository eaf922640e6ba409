#include "thinfilm/evolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "thinfilm/numerics.hpp"

namespace thinfilm {

namespace {

std::mutex fftw_plan_mutex;

struct RealFFT {
  int n;
  double* rbuf;
  fftw_complex* cbuf;
  fftw_plan fwd, bwd;

  explicit RealFFT(int n_) : n(n_) {
    rbuf = fftw_alloc_real(n);
    cbuf = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fwd = fftw_plan_dft_r2c_1d(n, rbuf, cbuf, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, cbuf, rbuf, FFTW_ESTIMATE);
  }
  ~RealFFT() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  std::vector<std::complex<double>> forward(const std::vector<double>& in) {
    std::copy(in.begin(), in.end(), rbuf);
    fftw_execute(fwd);
    std::vector<std::complex<double>> out(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) out[k] = {cbuf[k][0], cbuf[k][1]};
    return out;
  }
  std::vector<double> inverse(const std::vector<std::complex<double>>& in) {
    for (int k = 0; k <= n / 2; ++k) {
      cbuf[k][0] = in[k].real();
      cbuf[k][1] = in[k].imag();
    }
    fftw_execute(bwd);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = rbuf[j] / n;
    return out;
  }
};

std::vector<double> wavenumbers(int n, double L) {
  std::vector<double> k(n / 2 + 1);
  for (int m = 0; m <= n / 2; ++m) k[m] = 2.0 * std::numbers::pi * m / L;
  return k;
}

// spectral derivative with the Nyquist mode dropped for odd orders
std::vector<double> spectral_derivative(RealFFT& fft,
                                        const std::vector<double>& kappa,
                                        const std::vector<double>& f,
                                        int order) {
  auto F = fft.forward(f);
  int nh = static_cast<int>(F.size()) - 1;
  for (int m = 0; m <= nh; ++m) {
    std::complex<double> mu = std::pow(std::complex<double>(0.0, kappa[m]),
                                       order);
    if (m == nh && order % 2 == 1) mu = 0.0;
    F[m] *= mu;
  }
  return fft.inverse(F);
}

void check_grid(int n) {
  if (n < 16 || n % 2 != 0)
    throw domain_error("evolution: grid size must be even and >= 16");
}

}  // namespace

// ---------------------------------------------------------------------------
// thin-film stepper

struct ThinFilmStepper::Impl {
  int n;
  double L;
  mutable RealFFT fft;
  std::vector<double> kappa;

  Impl(int n_, double L_) : n(n_), L(L_), fft(n_), kappa(wavenumbers(n_, L_)) {}
};

ThinFilmStepper::ThinFilmStepper(ModelParams p, int n, double L) : p_(p) {
  p_.validate();
  check_grid(n);
  if (!(L > 0.0)) throw domain_error("ThinFilmStepper: L must be positive");
  impl_ = std::make_unique<Impl>(n, L);
}

ThinFilmStepper::~ThinFilmStepper() = default;

int ThinFilmStepper::n() const { return impl_->n; }
double ThinFilmStepper::L() const { return impl_->L; }

EvolutionState ThinFilmStepper::make_state(std::vector<double> h) const {
  if (static_cast<int>(h.size()) != impl_->n)
    throw domain_error("make_state: sample count does not match the grid");
  EvolutionState s;
  double mean = 0.0, mn = h[0];
  for (double v : h) {
    mean += v;
    mn = std::min(mn, v);
  }
  s.mass = mean / h.size() * impl_->L;
  s.hit_floor = mn <= height_floor;
  s.h = std::move(h);
  return s;
}

double ThinFilmStepper::cfl_dt(const std::vector<double>& h) const {
  double bmax = 0.0;
  for (double hj : h) {
    double b = -p_.g * hj * hj * hj +
               p_.M * hj * hj / ((1.0 + hj) * (1.0 + hj));
    bmax = std::max(bmax, std::abs(b));
  }
  double kmax = impl_->kappa.back();
  if (bmax * kmax * kmax == 0.0) return 1e6;
  return 0.8 / (bmax * kmax * kmax);
}

void ThinFilmStepper::step(EvolutionState& s, double dt_request) const {
  if (!(dt_request > 0.0)) throw domain_error("step: dt must be positive");
  if (static_cast<int>(s.h.size()) != impl_->n)
    throw domain_error("step: sample count does not match the grid");
  if (s.hit_floor) return;
  double mn = *std::min_element(s.h.begin(), s.h.end());
  if (mn <= height_floor) {
    s.hit_floor = true;
    return;
  }

  int nh = impl_->n / 2;
  const auto& kappa = impl_->kappa;
  double dt = std::min(dt_request, cfl_dt(s.h));

  auto H = impl_->fft.forward(s.h);
  std::vector<std::complex<double>> tmp(nh + 1);
  for (int m = 0; m <= nh; ++m)
    tmp[m] = std::complex<double>(0.0, m == nh ? 0.0 : kappa[m]) * H[m];
  auto hx = impl_->fft.inverse(tmp);
  for (int m = 0; m <= nh; ++m)
    tmp[m] = std::complex<double>(0.0, m == nh ? 0.0 : -kappa[m] * kappa[m] *
                                                           kappa[m]) *
             H[m];
  auto hxxx = impl_->fft.inverse(tmp);

  std::vector<double> q(impl_->n);
  double c = 0.0;
  for (int j = 0; j < impl_->n; ++j) {
    double hj = s.h[j];
    c = std::max(c, hj * hj * hj);
    q[j] = hj * hj * hj * (hxxx[j] - p_.g * hx[j]) +
           p_.M * hj * hj / ((1.0 + hj) * (1.0 + hj)) * hx[j];
  }
  auto Q = impl_->fft.forward(q);

  for (int m = 0; m <= nh; ++m) {
    double k2 = kappa[m] * kappa[m];
    double k4 = k2 * k2;
    std::complex<double> ik(0.0, m == nh ? 0.0 : kappa[m]);
    H[m] = (H[m] + dt * (c * k4 * H[m] - ik * Q[m])) / (1.0 + dt * c * k4);
  }
  auto hn = impl_->fft.inverse(H);

  double mn2 = *std::min_element(hn.begin(), hn.end());
  if (mn2 <= height_floor) {
    s.hit_floor = true;
    return;
  }
  s.h = std::move(hn);
  s.t += dt;
  s.dt = dt;
  s.mass = H[0].real() / impl_->n * impl_->L;
}

double ThinFilmStepper::mode_amplitude(const std::vector<double>& h,
                                       int ell) const {
  if (ell < 0 || ell > impl_->n / 2)
    throw domain_error("mode_amplitude: mode index out of range");
  auto H = impl_->fft.forward(h);
  double scale = (ell == 0 || ell == impl_->n / 2) ? 1.0 : 2.0;
  return scale * std::abs(H[ell]) / impl_->n;
}

double measure_growth_rate(int ell, double M, const ModelParams& p) {
  ModelParams q{p.g, M, p.k0};
  q.validate();
  int n = 256;
  if (ell < 1 || ell >= n / 2)
    throw domain_error("measure_growth_rate: mode index out of range");
  double L = 2.0 * std::numbers::pi / q.k0;
  ThinFilmStepper stepper(q, n, L);

  double seed = 1e-6, amp_hi = 1e-4, amp_lo = 1e-10, t_max = 200.0;
  std::vector<double> h0(n);
  auto x = PeriodicProfile::grid(q.k0, n);
  for (int j = 0; j < n; ++j) h0[j] = 1.0 + seed * std::cos(ell * q.k0 * x[j]);
  auto s = stepper.make_state(std::move(h0));

  std::vector<double> ts, la;
  while (true) {
    double a = stepper.mode_amplitude(s.h, ell);
    if (a >= amp_hi || a <= amp_lo) break;
    ts.push_back(s.t);
    la.push_back(std::log(a));
    stepper.step(s, 1e-4);
    if (s.hit_floor || s.t >= t_max) break;
  }
  if (ts.size() < 16)
    throw numerical_error(
        "measure_growth_rate: amplitude fit window not reached");
  return fit_slope(ts, la);
}

// ---------------------------------------------------------------------------
// amplitude equation stepper

struct SivashinskyStepper::Impl {
  int n;
  double L;
  mutable RealFFT fft;
  std::vector<double> kappa;

  Impl(int n_, double L_) : n(n_), L(L_), fft(n_), kappa(wavenumbers(n_, L_)) {}
};

SivashinskyStepper::SivashinskyStepper(double g, int n, double L, Form form)
    : g_(g), form_(form) {
  if (!(g > 0.0)) throw domain_error("SivashinskyStepper: g must be positive");
  check_grid(n);
  if (!(L > 0.0)) throw domain_error("SivashinskyStepper: L must be positive");
  impl_ = std::make_unique<Impl>(n, L);
}

SivashinskyStepper::~SivashinskyStepper() = default;

bool SivashinskyStepper::step(std::vector<double>& V, double dt) const {
  if (!(dt > 0.0) || dt > 2.0)
    throw domain_error("SivashinskyStepper: dt must be in (0, 2]");
  if (static_cast<int>(V.size()) != impl_->n)
    throw domain_error("SivashinskyStepper: sample count mismatch");

  int nh = impl_->n / 2;
  const auto& kappa = impl_->kappa;
  double c2 = form_ == Form::normal ? 1.0 : 0.25;
  double nsign = form_ == Form::normal ? -1.0 : 1.0;

  auto Vx = spectral_derivative(impl_->fft, kappa, V, 1);
  std::vector<double> w(impl_->n);
  for (int j = 0; j < impl_->n; ++j) w[j] = V[j] * Vx[j];
  auto W = impl_->fft.forward(w);
  auto F = impl_->fft.forward(V);
  for (int m = 0; m <= nh; ++m) {
    double k2 = kappa[m] * kappa[m];
    std::complex<double> ik(0.0, m == nh ? 0.0 : kappa[m]);
    std::complex<double> N = nsign * 2.0 * g_ * ik * W[m];
    F[m] = (F[m] + dt * N) / (1.0 + dt * (k2 * k2 - c2 * k2));
  }
  V = impl_->fft.inverse(F);

  double vmax = 0.0;
  for (double v : V) {
    if (!std::isfinite(v)) return false;
    vmax = std::max(vmax, std::abs(v));
  }
  return vmax <= 1e6;
}

std::vector<double> SivashinskyStepper::second_derivative(
    const std::vector<double>& V) const {
  return spectral_derivative(impl_->fft, impl_->kappa, V, 2);
}

double blowup_indicator(const std::vector<std::vector<double>>& snapshots,
                        double dT, double L) {
  if (snapshots.empty())
    throw domain_error("blowup_indicator: no snapshots");
  if (!(dT > 0.0) || !(L > 0.0))
    throw domain_error("blowup_indicator: dT and L must be positive");
  int n = static_cast<int>(snapshots[0].size());
  check_grid(n);
  RealFFT fft(n);
  auto kappa = wavenumbers(n, L);
  std::vector<double> f;
  f.reserve(snapshots.size());
  for (const auto& V : snapshots) {
    if (static_cast<int>(V.size()) != n)
      throw domain_error("blowup_indicator: snapshot size mismatch");
    auto Vxx = spectral_derivative(fft, kappa, V, 2);
    double m = 0.0;
    for (double v : Vxx) m = std::max(m, std::abs(v));
    f.push_back(m);
  }
  double acc = 0.0;
  for (size_t i = 1; i < f.size(); ++i)
    acc += 0.5 * dT * (f[i] * f[i] + f[i - 1] * f[i - 1]);
  return acc;
}

// ---------------------------------------------------------------------------
// amplitude correspondence

AmplitudeReport amplitude_correspondence(double eps, double g,
                                         double seed_amplitude) {
  if (!(eps > 0.0) || eps > 0.3)
    throw domain_error("amplitude_correspondence: eps must be in (0, 0.3]");
  if (!(g > 0.0))
    throw domain_error("amplitude_correspondence: g must be positive");

  int n = 128;
  double LX = 2.0 * std::numbers::pi;
  std::vector<double> V0(n), X(n);
  for (int j = 0; j < n; ++j) {
    X[j] = -0.5 * LX + LX * j / n;
    V0[j] = seed_amplitude * std::cos(X[j]);
  }

  double T_end = 1.0, dT = 1e-4;
  int n_steps = static_cast<int>(std::lround(T_end / dT));

  SivashinskyStepper amp(g, n, LX, SivashinskyStepper::Form::ansatz);
  std::vector<double> V = V0;
  for (int i = 0; i < n_steps; ++i)
    if (!amp.step(V, dT))
      throw numerical_error("amplitude_correspondence: amplitude overflow");

  ModelParams p{g, 4.0 * g + eps * eps, eps};
  ThinFilmStepper film(p, n, LX / eps);
  std::vector<double> h0(n);
  for (int j = 0; j < n; ++j) h0[j] = 1.0 + eps * eps * V0[j];
  auto s = film.make_state(std::move(h0));
  double t_end = std::pow(eps, -4.0);
  double dt = dT * std::pow(eps, -4.0);
  while (s.t < t_end - 1e-9 * t_end) {
    film.step(s, std::min(dt, t_end - s.t));
    if (s.hit_floor)
      throw numerical_error("amplitude_correspondence: film hit the floor");
  }

  AmplitudeReport rep;
  rep.eps = eps;
  rep.g = g;
  rep.t_end = t_end;
  rep.V_amp = V;
  rep.V_film.resize(n);
  double d = 0.0;
  for (int j = 0; j < n; ++j) {
    rep.V_film[j] = (s.h[j] - 1.0) / (eps * eps);
    d = std::max(d, std::abs(rep.V_film[j] - V[j]));
  }
  rep.discrepancy = d;
  return rep;
}

double ansatz_residual_ratio(double eps, double g, double seed_amplitude) {
  if (!(eps > 0.0) || eps > 0.3)
    throw domain_error("ansatz_residual_ratio: eps must be in (0, 0.3]");
  int n = 256;
  double LX = 2.0 * std::numbers::pi;
  RealFFT fft(n);
  auto kX = wavenumbers(n, LX);
  std::vector<double> V0(n);
  for (int j = 0; j < n; ++j) {
    double X = -0.5 * LX + LX * j / n;
    V0[j] = seed_amplitude * (std::cos(X) + 0.4 * std::cos(2.0 * X));
  }

  // amplitude-equation right-hand side on the slow scales
  auto V1 = spectral_derivative(fft, kX, V0, 1);
  auto V2 = spectral_derivative(fft, kX, V0, 2);
  auto V4 = spectral_derivative(fft, kX, V0, 4);
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = V0[j] * V1[j];
  auto wx = spectral_derivative(fft, kX, w, 1);
  std::vector<double> rhs_amp(n);
  for (int j = 0; j < n; ++j)
    rhs_amp[j] = -V4[j] - 0.25 * V2[j] + 2.0 * g * wx[j];

  // film flux divergence at h = 1 + eps^2 V0(eps x)
  double Lx = LX / eps;
  auto kx = wavenumbers(n, Lx);
  std::vector<double> h(n);
  for (int j = 0; j < n; ++j) h[j] = 1.0 + eps * eps * V0[j];
  auto h1 = spectral_derivative(fft, kx, h, 1);
  auto h3 = spectral_derivative(fft, kx, h, 3);
  ModelParams p{g, 4.0 * g + eps * eps, 1.0};
  auto q = stationary_flux(h, h1, h3, p);
  auto dq = spectral_derivative(fft, kx, q, 1);

  double e6 = std::pow(eps, 6.0);
  double r = 0.0;
  for (int j = 0; j < n; ++j)
    r = std::max(r, std::abs(e6 * rhs_amp[j] + dq[j]));
  return r / e6;
}

}  // namespace thinfilm
