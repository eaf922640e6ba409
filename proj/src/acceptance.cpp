#include "thinfilm/acceptance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thinfilm/continuation.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/evolution.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/numerics.hpp"
#include "thinfilm/phase.hpp"
#include "thinfilm/solver.hpp"
#include "thinfilm/stability.hpp"

namespace thinfilm {
namespace {

constexpr double pi = std::numbers::pi;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct Check {
  bool ok = true;
  std::ostringstream out;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      sep();
      out << "FAILED: " << what;
    }
  }
  void note(const std::string& what) {
    sep();
    out << what;
  }
  void sep() {
    if (out.tellp() > 0) out << "; ";
  }
};

// 1. exact instability thresholds and the collocation kernel at onset
void crit_thresholds(Check& c) {
  auto [ms, msk] = critical_marangoni(1.0, 1.0);
  c.require(ms == 4.0, "M* = " + num(ms) + ", expected exactly 4");
  c.require(msk == 8.0, "M*(1) = " + num(msk) + ", expected exactly 8");

  CollocationSystem sys(1.0, 1.0, 16);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(16);
  Eigen::MatrixXd J = sys.jacobian(zero, 8.0);
  double col1 = J.col(0).lpNorm<Eigen::Infinity>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  double smin = svd.singularValues().minCoeff();
  double snext = svd.singularValues()(svd.singularValues().size() - 2);
  c.require(col1 < 1e-10, "mode-1 column norm " + num(col1) + " at M = 8");
  c.require(smin < 1e-10, "smallest singular value " + num(smin));
  c.require(snext > 0.1, "kernel not one-dimensional, sigma_2 = " + num(snext));

  auto fp = find_fixed_points(HamiltonianParams{1.0, 4.0, K0});
  c.require(std::abs(fp.v_l) < 1e-9 && std::abs(fp.v_u) < 1e-9,
            "fixed points not collapsed at M = M*");
  c.require(fp.kind_l == FixedPointKind::degenerate &&
                fp.kind_u == FixedPointKind::degenerate,
            "fixed points not degenerate at M = M*");

  double K = -0.4;
  double vstar = v_max_infinity(K);
  auto wall = [&](double v) {
    return (1.0 + v) * std::log((1.0 + v) / (2.0 + v)) - K * v - K;
  };
  double vroot = find_root(wall, 0.0, 10.0);
  c.require(std::abs(vstar - vroot) < 1e-10,
            "boundary-orbit reach " + num(vstar) + " vs root " + num(vroot));
  c.note("M* = " + num(ms) + ", M*(1) = " + num(msk) +
         ", |J e_1| = " + num(col1) + ", sigma_min = " + num(smin));
}

// 2. curvature of the bifurcation curve M(s) at onset
void crit_curvature(Check& c) {
  ContinuationSettings st;
  st.max_steps = 10;
  st.ds_max = 0.05;
  auto rec = Continuation(st).run();
  c.require(static_cast<int>(rec.points.size()) == 10,
            "expected 10 branch points, got " + num(rec.points.size()));
  if (rec.points.size() < 4) return;

  int n = static_cast<int>(rec.points.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double s = rec.points[i].profile.coeffs()[0];
    A(i, 0) = 1.0;
    A(i, 1) = s * s;
    A(i, 2) = s * s * s * s;
    y(i) = rec.points[i].M;
  }
  Eigen::Vector3d cf = A.colPivHouseholderQr().solve(y);
  double curv = 2.0 * cf(1);
  double target = -49.0 / 3.0;
  double rel = std::abs(curv - target) / std::abs(target);
  c.require(rel < 0.05, "d2M/ds2 = " + num(curv) + ", target " + num(target) +
                            ", rel err " + num(rel));
  c.require(std::abs(cf(0) - 8.0) < 0.02,
            "fitted onset " + num(cf(0)) + " not at 8");

  int k_ok = 0;
  for (int i = 0; i < 5; ++i) {
    double s = rec.points[i].profile.coeffs()[0];
    double ratio = (K0 - rec.points[i].K) / (s * s);
    if (ratio > 0.10 && ratio < 0.16) ++k_ok;
  }
  c.require(k_ok == 5, "mass-constant curvature off 1/8 near onset");
  c.note("d2M/ds2 = " + num(curv) + " vs -49/3, rel err " + num(rel));
}

// 3. period of small orbits at the critical point
void crit_period(Check& c) {
  HamiltonianParams hp{1.0, 8.0, K0};
  auto ei = energy_interval(hp);
  double E0 = 8.0 * std::log(0.5);
  c.require(std::abs(ei.E_min - E0) < 1e-12,
            "E_min = " + num(ei.E_min) + ", expected " + num(E0));

  double T = period(ei.E_min + 1e-6, hp);
  double rel = std::abs(T - 2.0 * pi) / (2.0 * pi);
  c.require(rel < 1e-3, "T(E_min + 1e-6) = " + num(T) + ", rel dev " + num(rel));

  double range = ei.E_max - ei.E_min;
  double prev = T;
  bool increasing = true;
  for (double f : {1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99}) {
    double Tf = period(ei.E_min + f * range, hp);
    if (Tf < prev - 1e-9) increasing = false;
    prev = Tf;
  }
  c.require(increasing, "period not increasing toward the homoclinic energy");
  c.require(prev > 1.5 * 2.0 * pi,
            "no slow-down near the saddle, T = " + num(prev));
  c.note("T = " + num(T) + ", rel dev " + num(rel) +
         ", T(0.99 range) = " + num(prev));
}

// 4. independent construction of the same solution
void crit_shooting(Check& c) {
  ModelParams p{1.0, 7.9, 1.0};
  auto sr = shoot_solution(7.9, p, 0.1);

  double s_exp = std::sqrt((8.0 - 7.9) * 6.0 / 49.0);
  auto [vp, Mp] = local_predictor(1.0, 1.0, s_exp);
  CollocationSystem sys(1.0, 1.0, 64);
  int iters = 0;
  Eigen::VectorXd a = sys.newton_solve(sys.coeffs_of(vp), 7.9, 1e-11, 50, &iters);
  PeriodicProfile vc = sys.profile(a);

  double linf = 0.0;
  for (double x : PeriodicProfile::grid(1.0, 512))
    linf = std::max(linf, std::abs(vc.eval(x) - sr.profile.eval(x)));
  c.require(linf < 1e-6, "profiles differ by " + num(linf) + " in sup norm");

  double Kc = mass_constant_K(vc);
  c.require(std::abs(Kc - sr.K) < 1e-6,
            "mass constants differ by " + num(std::abs(Kc - sr.K)));
  c.note("sup distance " + num(linf) + ", newton iters " + num(iters) +
         ", K = " + num(Kc));
}

// 5. energy conservation of the orbit integrator
void crit_symplectic(Check& c) {
  HamiltonianParams hp{1.0, 8.0, K0 - 0.05};
  auto ei = energy_interval(hp);
  double E = ei.E_min + 0.1 * (ei.E_max - ei.E_min);
  auto tp = turning_points(E, hp);
  double T = period(E, hp);

  auto tr = integrate_orbit(tp.q1, 0.0, T, 1e-3, hp);
  c.require(!tr.hit_boundary, "orbit hit the domain boundary");
  double drift = 0.0;
  for (std::size_t i = 0; i < tr.v.size(); ++i)
    drift = std::max(drift, std::abs(hamiltonian(tr.v[i], tr.w[i], hp) - E));
  c.require(drift < 1e-8, "energy drift " + num(drift) + " over one period");

  double dv = std::abs(tr.v.back() - tp.q1);
  double dw = std::abs(tr.w.back());
  c.require(dv < 1e-3 && dw < 1e-3,
            "no return after one period: (" + num(dv) + ", " + num(dw) + ")");
  c.note("H drift " + num(drift) + ", return gap (" + num(dv) + ", " +
         num(dw) + "), T = " + num(T));
}

// 6. strict upper bound K(v) < K0 away from the flat state
void crit_concavity(Check& c) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int accepted = 0, violations = 0;
  double worst_gap = 1e300;
  while (accepted < 1000) {
    std::vector<double> a(12);
    for (int l = 0; l < 12; ++l)
      a[l] = 0.3 * U(rng) / ((l + 1.0) * (l + 1.0));
    PeriodicProfile v(1.0, a);
    auto vals = v.sample(256);
    double minh = 1.0 + *std::min_element(vals.begin(), vals.end());
    if (minh <= 0.05) continue;
    ++accepted;
    double K = mass_constant_K(v);
    if (!(K < K0)) ++violations;
    worst_gap = std::min(worst_gap, K0 - K);
  }
  c.require(violations == 0, num(violations) + " profiles with K >= K0");

  PeriodicProfile flat(1.0, std::vector<double>{0.0});
  double gap0 = std::abs(mass_constant_K(flat) - K0);
  c.require(gap0 < 1e-14, "flat state gap " + num(gap0));
  c.note("1000 profiles, smallest margin " + num(worst_gap) +
         ", flat-state gap " + num(gap0));
}

// 7. assembled derivatives against finite differences
void crit_jacobian(Check& c) {
  Continuation cont{ContinuationSettings{}};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> G(0.0, 1.0);
  double h = 1e-6;
  double worst = 0.0, worst_M = 0.0;
  for (double s : {0.05, 0.2, 0.5}) {
    auto bp = cont.solve_pinned(s);
    CollocationSystem sys(1.0, 1.0, bp.profile.modes());
    Eigen::VectorXd a = sys.coeffs_of(bp.profile);
    Eigen::MatrixXd J = sys.jacobian(a, bp.M);
    for (int d = 0; d < 10; ++d) {
      Eigen::VectorXd dir(a.size());
      for (int i = 0; i < dir.size(); ++i) dir(i) = G(rng);
      dir /= dir.norm();
      Eigen::VectorXd fd =
          (sys.residual(a + h * dir, bp.M) - sys.residual(a - h * dir, bp.M)) /
          (2.0 * h);
      Eigen::VectorXd Jd = J * dir;
      double rel = (Jd - fd).lpNorm<Eigen::Infinity>() /
                   std::max(Jd.lpNorm<Eigen::Infinity>(), 1e-8);
      worst = std::max(worst, rel);
    }
    Eigen::VectorXd fdM =
        (sys.residual(a, bp.M + h) - sys.residual(a, bp.M - h)) / (2.0 * h);
    Eigen::VectorXd dM = sys.dresidual_dM(a);
    worst_M = std::max(worst_M, (dM - fdM).lpNorm<Eigen::Infinity>() /
                                    std::max(dM.lpNorm<Eigen::Infinity>(), 1e-8));
  }
  c.require(worst < 1e-6, "worst directional mismatch " + num(worst));
  c.require(worst_M < 1e-6, "worst dF/dM mismatch " + num(worst_M));
  c.note("worst directional mismatch " + num(worst) + ", dF/dM " + num(worst_M));
}

// 8. continuation from onset to near rupture with solution-quality gates
void crit_rupture(Check& c) {
  ContinuationSettings st;
  st.rupture_threshold = 0.05;
  auto rec = Continuation(st).run();
  c.require(rec.termination == Termination::rupture_threshold,
            std::string("terminated by ") + to_string(rec.termination));
  auto diag = detect_rupture(rec, 0.05);
  c.require(diag.reached, "min film height never drops below 0.05");
  if (!diag.reached) return;
  c.require(diag.min_at_half_period,
            "minimum away from the half period, at x = " +
                num(diag.min_location));

  int bad_resid = 0, bad_flux = 0, bad_nodal = 0, bad_K = 0;
  for (std::size_t i = 0; i < rec.points.size(); ++i) {
    const auto& bp = rec.points[i];
    CollocationSystem sys(st.g, st.k0, bp.profile.modes());
    double rn = sys.residual(sys.coeffs_of(bp.profile), bp.M)
                    .lpNorm<Eigen::Infinity>();
    if (!(rn < 1e-11)) ++bad_resid;
    if (!(bp.flux_residual < 1e-6)) ++bad_flux;
    if (!monitor_nodal(bp.profile)) ++bad_nodal;
    if (i > 0 && !(bp.K < K0)) ++bad_K;
  }
  c.require(bad_resid == 0, num(bad_resid) + " points with residual >= 1e-11");
  c.require(bad_flux == 0, num(bad_flux) + " points with flux >= 1e-6");
  c.require(bad_nodal == 0, num(bad_nodal) + " points fail the nodal monitor");
  c.require(bad_K == 0, num(bad_K) + " points with K >= K0");

  auto index_below = [&](double thr) {
    for (std::size_t i = 0; i < rec.points.size(); ++i)
      if (rec.points[i].min_h < thr) return static_cast<int>(i);
    return -1;
  };
  int ia = index_below(0.5), ib = index_below(0.05);
  c.require(ia >= 0 && ib > ia, "reference heights 0.5 and 0.05 not crossed");
  if (ia < 0 || ib <= ia) return;

  auto sup_v2 = [&](const PeriodicProfile& v) {
    double m = 0.0;
    for (double x : PeriodicProfile::grid(st.k0, 8 * v.modes()))
      m = std::max(m, std::abs(v.deriv(x, 2)));
    return m;
  };
  auto w24 = [&](const PeriodicProfile& v) {
    auto xs = PeriodicProfile::grid(st.k0, 8 * v.modes());
    double s = 0.0;
    for (double x : xs) {
      double v0 = v.eval(x), v1 = v.deriv(x, 1), v2 = v.deriv(x, 2);
      s += (std::pow(v0, 4) + std::pow(v1, 4) + std::pow(v2, 4)) / xs.size();
    }
    return std::pow(s, 0.25);
  };
  double va = sup_v2(rec.points[ia].profile);
  double vb = sup_v2(rec.points[ib].profile);
  c.require(vb > va, "curvature did not grow: " + num(va) + " -> " + num(vb));
  double wa = w24(rec.points[ia].profile);
  double wb = w24(rec.points[ib].profile);
  c.require(wb < 10.0 * wa,
            "W{2,4} diagnostic grew " + num(wb / wa) + "x, bound 10x");
  c.note(num(rec.points.size()) + " points, min_h " + num(diag.min_h) +
         ", sup|v''| " + num(va) + " -> " + num(vb) + ", W{2,4} x" +
         num(wb / wa) + ", M_inf est " + num(diag.M_infinity));
}

// 9. measured linear rates of the flat film
void crit_rates(Check& c) {
  ModelParams p{1.0, 8.5, 1.0};
  double r1 = measure_growth_rate(1, 8.5, p);
  double rel1 = std::abs(r1 - 0.125) / 0.125;
  c.require(rel1 < 0.02,
            "rate(ell=1, M=8.5) = " + num(r1) + ", target 0.125");
  double r2 = measure_growth_rate(2, 8.0, p);
  double rel2 = std::abs(r2 + 12.0) / 12.0;
  c.require(rel2 < 0.02, "rate(ell=2, M=8) = " + num(r2) + ", target -12");
  c.note("rates " + num(r1) + " (target 0.125), " + num(r2) +
         " (target -12)");
}

// 10. spectrum of the linearization about branch solutions
void crit_spectrum(Check& c) {
  Continuation cont{ContinuationSettings{}};
  auto bp = cont.solve_pinned(0.05);
  auto rep = periodic_state_spectrum(bp, 1.0, 8);
  c.require(rep.leading > 0.0, "leading eigenvalue " + num(rep.leading));
  c.require(std::abs(rep.eigenvalues[0].imag()) < 1e-8,
            "leading eigenvalue not real");

  auto [near_zero, align] = translation_mode_check(bp, 1.0);
  c.require(align < 1e-8, "translation-mode action " + num(align));

  std::vector<double> ls, ld;
  for (double s : {0.01, 0.02, 0.04}) {
    auto b = cont.solve_pinned(s);
    auto r = periodic_state_spectrum(b, 1.0, 40);
    ModelParams ps{1.0, b.M, 1.0};
    double dev = 0.0;
    for (int l = 0; l <= 5; ++l) {
      double target = constant_state_symbol(static_cast<double>(l), ps);
      double best = 1e300;
      for (const auto& z : r.eigenvalues)
        best = std::min(best, std::abs(z - std::complex<double>(target, 0.0)));
      dev = std::max(dev, best);
    }
    ls.push_back(std::log(s));
    ld.push_back(std::log(dev));
  }
  double slope = fit_slope(ls, ld);
  c.require(slope >= 0.8, "deviation-from-symbol slope " + num(slope));
  c.note("leading " + num(rep.leading) + ", nearest-to-zero |eig| " +
         num(near_zero) + ", deviation slope " + num(slope));
}

// 11. long-wave amplitude equation against the rescaled film
void crit_amplitude(Check& c) {
  auto ra = amplitude_correspondence(0.2, 1.0);
  auto rb = amplitude_correspondence(0.1, 1.0);
  c.require(rb.discrepancy < ra.discrepancy,
            "discrepancy not decreasing: " + num(ra.discrepancy) + " -> " +
                num(rb.discrepancy));

  auto rate = [](int n, double L, int ell, double lo, double hi) {
    SivashinskyStepper stp(1.0, n, L);
    double kap = 2.0 * pi / L * ell;
    std::vector<double> V(n);
    for (int j = 0; j < n; ++j)
      V[j] = 1e-6 * std::cos(kap * (-0.5 * L + L * j / n));
    double dt = 2e-4, t = 0.0;
    std::vector<double> ts, la;
    while (t < 100.0) {
      double m = 0.0;
      for (double v : V) m = std::max(m, std::abs(v));
      if (m < lo || m > hi) break;
      ts.push_back(t);
      la.push_back(std::log(m));
      if (!stp.step(V, dt)) break;
      t += dt;
    }
    if (ts.size() < 16)
      throw numerical_error("amplitude rate fit window not reached");
    return fit_slope(ts, la);
  };
  double rd = rate(64, 2.0 * pi, 2, 1e-10, 1.1e-6);
  double reld = std::abs(rd + 12.0) / 12.0;
  c.require(reld < 0.02, "decay rate " + num(rd) + ", target -12");
  double rg = rate(64, 4.0 * pi, 1, 0.9e-6, 1e-4);
  double relg = std::abs(rg - 3.0 / 16.0) / (3.0 / 16.0);
  c.require(relg < 0.02, "growth rate " + num(rg) + ", target 3/16");
  c.note("discrepancy " + num(ra.discrepancy) + " -> " + num(rb.discrepancy) +
         ", rates " + num(rd) + " / " + num(rg));
}

// 12. discrete mass conservation of the film stepper
void crit_mass(Check& c) {
  ModelParams p{1.0, 8.5, 1.0};
  int n = 256;
  ThinFilmStepper stp(p, n, 2.0 * pi);
  std::vector<double> h0(n);
  for (int j = 0; j < n; ++j)
    h0[j] = 1.0 + 0.1 * std::cos(-pi + 2.0 * pi * j / n);
  auto s = stp.make_state(std::move(h0));
  double m0 = s.mass;
  double drift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    stp.step(s, 1e-4);
    drift = std::max(drift, std::abs(s.mass - m0) / std::abs(m0));
  }
  c.require(!s.hit_floor, "height floor reached");
  c.require(drift < 1e-8, "relative mass drift " + num(drift));
  c.note("relative drift " + num(drift) + " over 1e4 steps, t = " + num(s.t));
}

struct Entry {
  int id;
  const char* name;
  void (*fn)(Check&);
};

constexpr Entry entries[] = {
    {1, "critical-thresholds", crit_thresholds},
    {2, "subcritical-curvature", crit_curvature},
    {3, "small-orbit-period", crit_period},
    {4, "shooting-vs-collocation", crit_shooting},
    {5, "symplectic-energy-drift", crit_symplectic},
    {6, "mass-constant-concavity", crit_concavity},
    {7, "jacobian-consistency", crit_jacobian},
    {8, "branch-to-rupture", crit_rupture},
    {9, "constant-state-rates", crit_rates},
    {10, "periodic-state-spectrum", crit_spectrum},
    {11, "amplitude-correspondence", crit_amplitude},
    {12, "mass-conservation", crit_mass},
};

}  // namespace

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;
  for (const auto& e : entries) {
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      e.fn(c);
      r.pass = c.ok;
      r.detail = c.out.str();
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    out.push_back(std::move(r));
  }
  return out;
}

int acceptance_main() {
  auto results = run_acceptance();
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    std::printf("[%s] %2d %-26s (%6.2fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n",
              static_cast<int>(std::size(entries)) - failures,
              static_cast<int>(std::size(entries)));
  return failures;
}

}  // namespace thinfilm
