#pragma once

#include <vector>

#include "thinfilm/model.hpp"

namespace thinfilm {

enum class FixedPointKind { center_minimum, saddle, degenerate };

struct FixedPointPair {
  double v_l = 0.0;  // in (-1, 0]
  double v_u = 0.0;  // >= 0
  FixedPointKind kind_l = FixedPointKind::degenerate;
  FixedPointKind kind_u = FixedPointKind::degenerate;
};

struct EnergyInterval {
  double E_min = 0.0;
  double E_max = 0.0;
  bool has_homoclinic = false;
};

struct TurningPoints {
  double q0 = 0.0;
  double q1 = 0.0;
};

struct OrbitQuadrature {
  double period = 0.0;
  double mean_v = 0.0;
  TurningPoints tp;
};

struct Trajectory {
  std::vector<double> t, v, w;
  bool hit_boundary = false;
};

const char* to_string(FixedPointKind k);

FixedPointPair find_fixed_points(const HamiltonianParams& p);
EnergyInterval energy_interval(const HamiltonianParams& p);
TurningPoints turning_points(double E, const HamiltonianParams& p);

// closed-orbit period and orbit average of v at energy E
OrbitQuadrature orbit_quadrature(double E, const HamiltonianParams& p);
double period(double E, const HamiltonianParams& p);

// Stoermer-Verlet integration of v'' = -G'(v) from (v0, w0)
Trajectory integrate_orbit(double v0, double w0, double t_end, double dt,
                           const HamiltonianParams& p);

// rightmost reach of the degenerate boundary orbit, -(2 e^K - 1)/(e^K - 1)
double v_max_infinity(double K);

}  // namespace thinfilm
