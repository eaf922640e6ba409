#pragma once

#include <memory>
#include <vector>

#include "thinfilm/model.hpp"

namespace thinfilm {

struct EvolutionState {
  double t = 0.0;
  std::vector<double> h;
  double dt = 0.0;      // dt actually taken on the last step
  double mass = 0.0;    // period integral of h
  bool hit_floor = false;
};

static constexpr double height_floor = 1e-4;

// semi-implicit spectral stepper for
// h_t + (h^3 (h_xxx - g h_x) + M h^2/(1+h)^2 h_x)_x = 0
// on n uniform points over a period-L domain; the fourth-order part is
// stabilized implicitly with frozen mobility c = max h^3
class ThinFilmStepper {
 public:
  ThinFilmStepper(ModelParams p, int n, double L);
  ~ThinFilmStepper();
  ThinFilmStepper(const ThinFilmStepper&) = delete;
  ThinFilmStepper& operator=(const ThinFilmStepper&) = delete;

  EvolutionState make_state(std::vector<double> h) const;

  // advances by min(dt_request, cfl limit); on a floor violation the state
  // is left unadvanced and flagged
  void step(EvolutionState& s, double dt_request) const;

  double cfl_dt(const std::vector<double>& h) const;
  double mode_amplitude(const std::vector<double>& h, int ell) const;

  const ModelParams& params() const { return p_; }
  int n() const;
  double L() const;

 private:
  ModelParams p_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// exponential rate of mode ell about h = 1 at Marangoni number M,
// fitted while the mode amplitude crosses [1e-6, 1e-4] (or decays from it)
double measure_growth_rate(int ell, double M, const ModelParams& p);

// semi-implicit stepper for the long-wave amplitude equation; the normal
// form is V_T = -V_XXXX - V_XX - 2 g (V V_X)_X, the ansatz form (scales of
// h = 1 + eps^2 V(eps^4 t, eps x) at M = 4g + eps^2) is
// V_T = -V_XXXX - V_XX/4 + 2 g (V V_X)_X; X -> X/2, T -> T/16, V -> -4V
// maps the ansatz form to the normal form
class SivashinskyStepper {
 public:
  enum class Form { normal, ansatz };

  SivashinskyStepper(double g, int n, double L, Form form = Form::normal);
  ~SivashinskyStepper();
  SivashinskyStepper(const SivashinskyStepper&) = delete;
  SivashinskyStepper& operator=(const SivashinskyStepper&) = delete;

  // returns false when the overflow guard ||V||_inf > 1e6 trips
  bool step(std::vector<double>& V, double dt) const;

  std::vector<double> second_derivative(const std::vector<double>& V) const;

 private:
  double g_;
  Form form_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// running integral of ||V_XX||_inf^2 over snapshots spaced dT apart
double blowup_indicator(const std::vector<std::vector<double>>& snapshots,
                        double dT, double L);

struct AmplitudeReport {
  double eps = 0.0;
  double g = 1.0;
  double discrepancy = 0.0;     // sup |rescaled film deviation - V| at T = 1
  double t_end = 0.0;           // film time horizon eps^-4
  std::vector<double> V_film;   // (h - 1)/eps^2 on the shared grid
  std::vector<double> V_amp;
};

AmplitudeReport amplitude_correspondence(double eps, double g,
                                         double seed_amplitude = 0.1);

// sup norm of eps^6 RHS_ansatz(V0) minus the film flux divergence at
// h = 1 + eps^2 V0(eps x), M = 4g + eps^2, divided by eps^6
double ansatz_residual_ratio(double eps, double g, double seed_amplitude = 0.1);

}  // namespace thinfilm
