#include "thinfilm/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "thinfilm/numerics.hpp"

namespace thinfilm {

namespace {

constexpr double kind_band = 1e-10;
constexpr double k0_coincidence = 1e-12;

FixedPointKind classify(double g2) {
  if (g2 > kind_band) return FixedPointKind::center_minimum;
  if (g2 < -kind_band) return FixedPointKind::saddle;
  return FixedPointKind::degenerate;
}

double wall_energy(const HamiltonianParams& p) { return hamiltonian(-1.0, 0.0, p); }

}  // namespace

const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::center_minimum: return "center-minimum";
    case FixedPointKind::saddle: return "saddle";
    default: return "degenerate";
  }
}

FixedPointPair find_fixed_points(const HamiltonianParams& p) {
  p.validate();
  auto phi = [&](double v) { return omega(v) - p.K - (p.g / p.M) * v; };
  auto dphi = [&](double v) { return omega_prime(v) - p.g / p.M; };

  FixedPointPair fp;
  bool at_K0 = std::abs(p.K - K0) < k0_coincidence;
  bool at_Mstar = std::abs(p.M - 4.0 * p.g) < 1e-12;

  auto solve_upper = [&]() {
    double lo = at_K0 ? 1e-8 : 0.0;
    double hi = 1.0;
    int guard = 0;
    while (phi(hi) > 0.0 && ++guard < 60) hi *= 2.0;
    return find_root(phi, lo, hi, dphi);
  };
  auto solve_lower = [&]() {
    double hi = at_K0 ? -1e-8 : 0.0;
    double lo = -1.0 + 1e-13;
    for (double d : {1e-13, 1e-30, 1e-60, 1e-120, 1e-250}) {
      lo = -1.0 + d;
      if (phi(lo) < 0.0) break;
    }
    return find_root(phi, lo, hi, dphi);
  };

  if (at_K0) {
    if (at_Mstar) {
      fp.v_l = 0.0;
      fp.v_u = 0.0;
    } else if (p.M > 4.0 * p.g) {
      fp.v_l = 0.0;
      fp.v_u = solve_upper();
    } else {
      fp.v_u = 0.0;
      fp.v_l = solve_lower();
    }
  } else {
    fp.v_l = solve_lower();
    fp.v_u = solve_upper();
  }

  fp.kind_l = classify(potential_G(fp.v_l, p, 2));
  fp.kind_u = classify(potential_G(fp.v_u, p, 2));
  return fp;
}

EnergyInterval energy_interval(const HamiltonianParams& p) {
  auto fp = find_fixed_points(p);
  if (std::abs(fp.v_l - fp.v_u) < 1e-12)
    throw domain_error("energy_interval: fixed points coincide");
  EnergyInterval ei;
  ei.E_min = hamiltonian(fp.v_l, 0.0, p);
  double E_wall = wall_energy(p);
  double E_saddle = hamiltonian(fp.v_u, 0.0, p);
  ei.has_homoclinic = E_wall >= E_saddle;
  ei.E_max = std::min(E_wall, E_saddle);
  return ei;
}

TurningPoints turning_points(double E, const HamiltonianParams& p) {
  auto ei = energy_interval(p);
  if (!(E > ei.E_min) || !(E < ei.E_max))
    throw domain_error("turning_points: energy outside the closed-orbit range");
  auto fp = find_fixed_points(p);
  auto f = [&](double v) { return E - potential_G(v, p, 0); };
  auto df = [&](double v) { return -potential_G(v, p, 1); };
  TurningPoints tp;
  tp.q0 = find_root(f, -1.0 + 1e-14, fp.v_l, df);
  tp.q1 = find_root(f, fp.v_l, fp.v_u, df);
  return tp;
}

OrbitQuadrature orbit_quadrature(double E, const HamiltonianParams& p) {
  static const GaussLegendre gl(200);
  auto tp = turning_points(E, p);
  double q0 = tp.q0, q1 = tp.q1;
  double span = q1 - q0;
  if (!(span > 0.0))
    throw numerical_error("orbit_quadrature: empty turning interval");

  int n = static_cast<int>(gl.nodes.size());
  // E - G(v) = W(theta) (v - q0)(q1 - v) at v = q0 + span sin^2(theta);
  // W is smooth and positive, so the quadrature sees no endpoint singularity
  std::vector<double> W(n), vs(n);
  std::vector<char> good(n, 0);
  // below this the numerator is dominated by rounding in G
  double num_floor =
      1e4 * std::numeric_limits<double>::epsilon() * (std::abs(E) + p.M + p.g);
  for (int i = 0; i < n; ++i) {
    double theta = 0.25 * std::numbers::pi * (gl.nodes[i] + 1.0);
    double s2 = std::sin(theta) * std::sin(theta);
    double v = q0 + span * s2;
    double num = E - potential_G(v, p, 0);
    double den = (v - q0) * (q1 - v);
    vs[i] = v;
    if (num > num_floor && den > 0.0) {
      W[i] = num / den;
      good[i] = 1;
    }
  }
  // near the turning points use the limit W -> |G'(q)| / span instead of
  // the noise-dominated ratio
  double Wl = -potential_G(q0, p, 1) / span;
  double Wr = potential_G(q1, p, 1) / span;
  for (int i = 0; i < n; ++i) {
    if (good[i]) continue;
    double Wend = (vs[i] - q0 < q1 - vs[i]) ? Wl : Wr;
    if (Wend > 0.0) {
      W[i] = Wend;
      continue;
    }
    int j = -1;
    for (int d = 1; d < n; ++d) {
      if (i - d >= 0 && good[i - d]) { j = i - d; break; }
      if (i + d < n && good[i + d]) { j = i + d; break; }
    }
    if (j < 0) throw numerical_error("orbit_quadrature: degenerate orbit");
    W[i] = W[j];
  }

  double scale = 0.25 * std::numbers::pi * std::numbers::sqrt2 * 2.0;
  double T = 0.0, Tv = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = scale * gl.weights[i] / std::sqrt(W[i]);
    T += f;
    Tv += f * vs[i];
  }
  return {T, Tv / T, tp};
}

double period(double E, const HamiltonianParams& p) {
  return orbit_quadrature(E, p).period;
}

Trajectory integrate_orbit(double v0, double w0, double t_end, double dt,
                           const HamiltonianParams& p) {
  p.validate();
  if (!(dt > 0.0)) throw domain_error("integrate_orbit: dt must be positive");
  if (!(t_end >= 0.0)) throw domain_error("integrate_orbit: t_end must be >= 0");
  if (!(v0 > -1.0)) throw domain_error("integrate_orbit: v0 must exceed -1");

  auto accel = [&](double v) { return -potential_G(v, p, 1); };
  long n = std::lround(std::ceil(t_end / dt - 1e-12));

  // fourth-order symplectic composition of leapfrog substeps (Yoshida)
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double wm = 1.0 - 2.0 * w1;
  const double sub[3] = {w1, wm, w1};

  Trajectory tr;
  tr.t.reserve(n + 1);
  tr.v.reserve(n + 1);
  tr.w.reserve(n + 1);
  double v = v0, w = w0;
  tr.t.push_back(0.0);
  tr.v.push_back(v);
  tr.w.push_back(w);
  for (long i = 0; i < n && !tr.hit_boundary; ++i) {
    double vc = v, wc = w;
    for (double c : sub) {
      double h = c * dt;
      double wh = wc + 0.5 * h * accel(vc);
      double vn = vc + h * wh;
      if (vn <= -1.0 + 1e-12) {
        tr.hit_boundary = true;
        break;
      }
      wc = wh + 0.5 * h * accel(vn);
      vc = vn;
    }
    if (tr.hit_boundary) break;
    v = vc;
    w = wc;
    tr.t.push_back((i + 1) * dt);
    tr.v.push_back(v);
    tr.w.push_back(w);
  }
  return tr;
}

double v_max_infinity(double K) {
  if (!(K < 0.0))
    throw domain_error("v_max_infinity: requires K < 0");
  double e = std::exp(K);
  return -(2.0 * e - 1.0) / (e - 1.0);
}

}  // namespace thinfilm
