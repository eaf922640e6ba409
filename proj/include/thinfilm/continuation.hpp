#pragma once

#include <Eigen/Dense>
#include <vector>

#include "thinfilm/solver.hpp"

namespace thinfilm {

struct BranchPoint {
  double s = 0.0;
  double M = 0.0;
  double K = 0.0;
  PeriodicProfile profile;
  double min_h = 0.0;
  double max_h = 0.0;
  double l2_norm = 0.0;
  double h2_norm = 0.0;
  double flux_residual = 0.0;
  double leading_eig = std::nan("");  // filled by the stability module
};

enum class Termination { rupture_threshold, step_failure, user_bound };

const char* to_string(Termination t);

struct BranchRecord {
  double g = 1.0;
  double k0 = 1.0;
  std::vector<BranchPoint> points;
  Termination termination = Termination::user_bound;
};

struct ContinuationSettings {
  double g = 1.0;
  double k0 = 1.0;
  int N = 64;
  double s0 = 0.02;
  double ds0 = 0.05;
  double ds_min = 1e-8;
  double ds_max = 0.2;
  int max_steps = 400;
  double rupture_threshold = 1e-2;
  int max_doublings = 2;
  double newton_tol = 1e-11;
  double flux_refine = 1e-7;  // mode count doubles above this flux residual
};

// small-amplitude expansion: profile s cos(k0 x) + ..., Marangoni number
// M*(k0) - (g + k0^2)(8 g + 41 k0^2)/(12 k0^2) s^2
std::pair<PeriodicProfile, double> local_predictor(double k0, double g,
                                                   double s);

class Continuation {
 public:
  explicit Continuation(ContinuationSettings st);

  // amplitude-pinned solve: unknowns (a, M) with a_1 = s fixed
  BranchPoint solve_pinned(double s) const;

  // one secant pseudo-arclength step from (prev, cur); throws on failure
  BranchPoint arclength_step(const BranchPoint& prev, const BranchPoint& cur,
                             double ds) const;

  // adaptive driver to rupture, step failure, or the step bound
  BranchRecord run() const;

  BranchPoint make_point(const CollocationSystem& sys, const Eigen::VectorXd& a,
                         double M, double s) const;

  const ContinuationSettings& settings() const { return st_; }

 private:
  std::pair<BranchPoint, int> step_core(const CollocationSystem& sys,
                                        const BranchPoint& prev,
                                        const BranchPoint& cur,
                                        double ds) const;

  ContinuationSettings st_;
};

// v' >= -1e-10 on (-pi/k0, 0), minimum at the half-period, maximum at 0
bool monitor_nodal(const PeriodicProfile& v);

struct RuptureDiagnosis {
  bool reached = false;
  int index = -1;
  double min_h = 0.0;
  double min_location = 0.0;
  bool min_at_half_period = false;
  double M_infinity = 0.0;
  double max_v2 = 0.0;  // max |v''| at the crossing point
};

RuptureDiagnosis detect_rupture(const BranchRecord& rec,
                                double threshold = 1e-2);

struct BoundsReport {
  double M_lower = 0.0;
  double M_upper = 0.0;
  double K_lower = 0.0;
  bool K_below_K0 = false;
};

BoundsReport branch_bounds_check(const BranchRecord& rec);

}  // namespace thinfilm
