#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thinfilm/acceptance.hpp"
#include "thinfilm/branch_io.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/continuation.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/evolution.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/numerics.hpp"
#include "thinfilm/phase.hpp"
#include "thinfilm/solver.hpp"
#include "thinfilm/stability.hpp"

namespace fs = std::filesystem;

namespace {

using namespace thinfilm;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw config_error("write failed: " + path.string());
}

void write_echo(const RunConfig& cfg) {
  write_file(fs::path(cfg.out_dir) / "config_echo.txt", echo_config(cfg));
}

std::string row(std::initializer_list<double> xs) {
  std::string s;
  bool first = true;
  for (double x : xs) {
    if (!first) s += ',';
    s += format_g17(x);
    first = false;
  }
  s += '\n';
  return s;
}

std::string snapshot_name(int idx) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%06d.csv", idx);
  return buf;
}

int cmd_fixed_points(const RunConfig& cfg) {
  HamiltonianParams hp{cfg.g, cfg.M, cfg.K};
  auto fp = find_fixed_points(hp);
  double E_min = std::nan(""), E_max = std::nan("");
  int homoclinic = 0;
  try {
    auto ei = energy_interval(hp);
    E_min = ei.E_min;
    E_max = ei.E_max;
    homoclinic = ei.has_homoclinic ? 1 : 0;
  } catch (const domain_error&) {
  }
  std::string s = "v_l,kind_l,v_u,kind_u,E_min,E_max,has_homoclinic\n";
  s += format_g17(fp.v_l);
  s += ',';
  s += to_string(fp.kind_l);
  s += ',';
  s += format_g17(fp.v_u);
  s += ',';
  s += to_string(fp.kind_u);
  s += ',';
  s += format_g17(E_min);
  s += ',';
  s += format_g17(E_max);
  s += ',';
  s += std::to_string(homoclinic);
  s += '\n';
  write_file(fs::path(cfg.out_dir) / "fixed_points.csv", s);
  std::cout << "fixed points: v_l = " << format_g17(fp.v_l) << " ("
            << to_string(fp.kind_l) << "), v_u = " << format_g17(fp.v_u)
            << " (" << to_string(fp.kind_u) << ")\n";
  return 0;
}

int cmd_period(const RunConfig& cfg) {
  HamiltonianParams hp{cfg.g, cfg.M, cfg.K};
  auto ei = energy_interval(hp);
  std::string s = "E,T,mean_v,q0,q1\n";
  auto add = [&](double E) {
    auto oq = orbit_quadrature(E, hp);
    s += row({E, oq.period, oq.mean_v, oq.tp.q0, oq.tp.q1});
  };
  if (cfg.E_set) {
    if (!(cfg.E > ei.E_min) || !(cfg.E < ei.E_max))
      throw domain_error("E outside the closed-orbit energy interval");
    add(cfg.E);
  } else {
    for (int i = 1; i <= cfg.samples; ++i)
      add(ei.E_min + (ei.E_max - ei.E_min) * i / (cfg.samples + 1.0));
  }
  write_file(fs::path(cfg.out_dir) / "period.csv", s);
  std::cout << "energy interval (" << format_g17(ei.E_min) << ", "
            << format_g17(ei.E_max) << "), "
            << (cfg.E_set ? 1 : cfg.samples) << " orbit(s)\n";
  return 0;
}

int cmd_phase_portrait(const RunConfig& cfg) {
  HamiltonianParams hp{cfg.g, cfg.M, cfg.K};
  double v0 = cfg.v0, w0 = cfg.w0;
  if (cfg.E_set) {
    auto tp = turning_points(cfg.E, hp);
    v0 = tp.q1;
    w0 = 0.0;
  }
  auto tr = integrate_orbit(v0, w0, cfg.t_end, cfg.dt, hp);
  std::string s = "v,w,t\n";
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    s += row({tr.v[i], tr.w[i], tr.t[i]});
  write_file(fs::path(cfg.out_dir) / "portrait.csv", s);
  std::cout << tr.t.size() << " samples from (" << format_g17(v0) << ", "
            << format_g17(w0) << ")"
            << (tr.hit_boundary ? ", stopped at the domain boundary" : "")
            << "\n";
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  ModelParams p = cfg.model();
  p.validate();
  auto [guess, M_pred] = local_predictor(cfg.k0, cfg.g, cfg.amplitude);
  CollocationSystem sys(cfg.g, cfg.k0, cfg.n_modes);
  int iters = 0;
  Eigen::VectorXd a =
      sys.newton_solve(sys.coeffs_of(guess), cfg.M, 1e-11, 50, &iters);
  PeriodicProfile prof = sys.profile(a);
  std::string s = "x,v,h\n";
  for (double x : PeriodicProfile::grid(cfg.k0, 4 * cfg.n_modes)) {
    double v = prof.eval(x);
    s += row({x, v, 1.0 + v});
  }
  write_file(fs::path(cfg.out_dir) / "profile.csv", s);
  auto vals = prof.sample(4 * cfg.n_modes);
  double min_h = 1.0 + *std::min_element(vals.begin(), vals.end());
  std::cout << "solved at M = " << format_g17(cfg.M) << " in " << iters
            << " iterations, K = " << format_g17(mass_constant_K(prof))
            << ", min h = " << format_g17(min_h) << "\n";
  return 0;
}

int cmd_continue_branch(const RunConfig& cfg) {
  ContinuationSettings st;
  st.g = cfg.g;
  st.k0 = cfg.k0;
  st.N = cfg.n_modes;
  st.ds0 = cfg.ds;
  st.max_steps = cfg.max_steps;
  st.rupture_threshold = cfg.rupture_threshold;
  auto rec = Continuation(st).run();
  fill_leading_eigenvalues(rec);
  emit_branch(rec, cfg.out_dir);
  const auto& last = rec.points.back();
  std::cout << rec.points.size() << " branch points, termination "
            << to_string(rec.termination)
            << ", final M = " << format_g17(last.M)
            << ", min h = " << format_g17(last.min_h) << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
  if (cfg.branch_file.empty())
    throw config_error("spectrum requires --branch-file");
  auto bp = read_branch_point(cfg.branch_file, cfg.point_index);
  auto rep = periodic_state_spectrum(bp, cfg.g, cfg.n_modes);
  std::string s = "re,im\n";
  for (const auto& z : rep.eigenvalues) s += row({z.real(), z.imag()});
  write_file(fs::path(cfg.out_dir) / "spectrum.csv", s);
  if (cfg.bloch_sweep) {
    std::string b = "xi,re,im\n";
    double k0 = bp.profile.k0();
    for (int i = 0; i <= cfg.samples; ++i) {
      double xi = 0.5 * k0 * i / cfg.samples;
      for (const auto& z : bloch_spectrum(bp, cfg.g, xi, cfg.n_modes))
        b += row({xi, z.real(), z.imag()});
    }
    write_file(fs::path(cfg.out_dir) / "bloch.csv", b);
  }
  std::cout << "leading eigenvalue " << format_g17(rep.leading) << " at M = "
            << format_g17(bp.M) << ", min h = " << format_g17(bp.min_h)
            << "\n";
  return 0;
}

int cmd_evolve(const RunConfig& cfg) {
  ModelParams p = cfg.model();
  p.validate();
  int n = cfg.grid;
  double L = 2.0 * std::numbers::pi / cfg.k0;
  ThinFilmStepper stp(p, n, L);
  auto xs = PeriodicProfile::grid(cfg.k0, n);
  std::vector<double> h0(n);
  for (int j = 0; j < n; ++j)
    h0[j] = 1.0 + cfg.amplitude * std::cos(cfg.mode_ell * cfg.k0 * xs[j]);
  auto s = stp.make_state(std::move(h0));

  Eigen::MatrixXd D2 = fourier_diff_matrix(n, L, 2);
  std::string diag = "t,mass,min_h,max_mode,blowup_indicator\n";
  double indicator = 0.0, prev_f = 0.0, prev_t = 0.0;
  int snap_idx = 0;
  auto record = [&]() {
    Eigen::Map<const Eigen::VectorXd> h(s.h.data(), n);
    double f = (D2 * h).lpNorm<Eigen::Infinity>();
    f *= f;
    if (snap_idx > 0) indicator += 0.5 * (f + prev_f) * (s.t - prev_t);
    prev_f = f;
    prev_t = s.t;
    double max_mode = 0.0;
    for (int ell = 1; ell <= n / 2; ++ell)
      max_mode = std::max(max_mode, stp.mode_amplitude(s.h, ell));
    double min_h = *std::min_element(s.h.begin(), s.h.end());
    diag += row({s.t, s.mass, min_h, max_mode, indicator});
    std::string snap = "x,h\n";
    for (int j = 0; j < n; ++j) snap += row({xs[j], s.h[j]});
    write_file(fs::path(cfg.out_dir) / snapshot_name(snap_idx), snap);
    ++snap_idx;
  };

  record();
  long long k = 0;
  while (s.t < cfg.t_end * (1.0 - 1e-12)) {
    stp.step(s, std::min(cfg.dt, cfg.t_end - s.t));
    if (s.hit_floor) break;
    if (++k % cfg.snapshot_every == 0) record();
  }
  if (k % cfg.snapshot_every != 0 || s.hit_floor) record();
  write_file(fs::path(cfg.out_dir) / "diagnostics.csv", diag);
  std::cout << snap_idx << " snapshots to t = " << format_g17(s.t)
            << (s.hit_floor ? ", stopped at the height floor" : "") << "\n";
  return 0;
}

int cmd_amplitude(const RunConfig& cfg) {
  int n = cfg.grid;
  double L = 2.0 * std::numbers::pi / cfg.k0;
  SivashinskyStepper stp(cfg.g, n, L);
  std::vector<double> V(n), X(n);
  for (int j = 0; j < n; ++j) {
    X[j] = -0.5 * L + L * j / n;
    V[j] = cfg.amplitude * std::cos(cfg.mode_ell * cfg.k0 * X[j]);
  }

  std::string diag = "t,mass,min_h,max_mode,blowup_indicator\n";
  double indicator = 0.0, prev_f = 0.0, prev_t = 0.0, t = 0.0;
  int snap_idx = 0;
  bool overflow = false;
  auto record = [&]() {
    auto Vxx = stp.second_derivative(V);
    double f = 0.0;
    for (double v : Vxx) f = std::max(f, std::abs(v));
    f *= f;
    if (snap_idx > 0) indicator += 0.5 * (f + prev_f) * (t - prev_t);
    prev_f = f;
    prev_t = t;
    double max_mode = 0.0;
    for (int ell = 1; ell <= n / 2; ++ell) {
      double cr = 0.0, ci = 0.0;
      for (int j = 0; j < n; ++j) {
        double arg = 2.0 * std::numbers::pi * ell * j / n;
        cr += V[j] * std::cos(arg);
        ci -= V[j] * std::sin(arg);
      }
      double amp = (ell == n / 2 ? 1.0 : 2.0) * std::hypot(cr, ci) / n;
      max_mode = std::max(max_mode, amp);
    }
    double mean = 0.0, vmin = V[0];
    for (double v : V) {
      mean += v / n;
      vmin = std::min(vmin, v);
    }
    diag += row({t, mean * L, vmin, max_mode, indicator});
    std::string snap = "X,V\n";
    for (int j = 0; j < n; ++j) snap += row({X[j], V[j]});
    write_file(fs::path(cfg.out_dir) / snapshot_name(snap_idx), snap);
    ++snap_idx;
  };

  record();
  long long k = 0;
  while (t < cfg.t_end * (1.0 - 1e-12)) {
    double dt = std::min(cfg.dt, cfg.t_end - t);
    if (!stp.step(V, dt)) {
      overflow = true;
      break;
    }
    t += dt;
    if (++k % cfg.snapshot_every == 0) record();
  }
  if (!overflow && k % cfg.snapshot_every != 0) record();
  write_file(fs::path(cfg.out_dir) / "diagnostics.csv", diag);
  std::cout << snap_idx << " snapshots to t = " << format_g17(t)
            << (overflow ? ", overflow guard tripped (finite-time blow-up)"
                         : "")
            << ", indicator = " << format_g17(indicator) << "\n";
  return 0;
}

int cmd_verify(const RunConfig&) { return acceptance_main() == 0 ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary periodic solutions, stability, and evolution of a "
               "thermocapillary thin film"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  // the config file loads first so command-line flags override it
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    try {
      cfg = parse_config_file(config_path);
    } catch (const config_error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  }

  app.add_option("--config", config_path, "key = value configuration file");

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path,
                   "key = value configuration file");
    sc->add_option("--out-dir", cfg.out_dir, "output directory");
    return sc;
  };

  auto* sc_fp = add_common(app.add_subcommand(
      "fixed-points", "fixed points and orbit energy interval"));
  sc_fp->add_option("--g", cfg.g, "gravity number");
  sc_fp->add_option("--M", cfg.M, "Marangoni number");
  sc_fp->add_option("--K", cfg.K, "mass constant");

  auto* sc_pd = add_common(
      app.add_subcommand("period", "closed-orbit periods and means"));
  sc_pd->add_option("--g", cfg.g, "gravity number");
  sc_pd->add_option("--M", cfg.M, "Marangoni number");
  sc_pd->add_option("--K", cfg.K, "mass constant");
  sc_pd->add_option("--E", cfg.E, "orbit energy (default: energy sweep)");
  sc_pd->add_option("--samples", cfg.samples, "energies in the sweep");

  auto* sc_pp = add_common(
      app.add_subcommand("phase-portrait", "orbit samples v, w, t"));
  sc_pp->add_option("--g", cfg.g, "gravity number");
  sc_pp->add_option("--M", cfg.M, "Marangoni number");
  sc_pp->add_option("--K", cfg.K, "mass constant");
  sc_pp->add_option("--E", cfg.E, "start on the orbit of this energy");
  sc_pp->add_option("--v0", cfg.v0, "initial deviation");
  sc_pp->add_option("--w0", cfg.w0, "initial slope");
  sc_pp->add_option("--t-end", cfg.t_end, "integration time");
  sc_pp->add_option("--dt", cfg.dt, "time step");

  auto* sc_sv = add_common(
      app.add_subcommand("solve", "periodic profile at fixed M"));
  sc_sv->add_option("--g", cfg.g, "gravity number");
  sc_sv->add_option("--k0", cfg.k0, "fundamental wavenumber");
  sc_sv->add_option("--M", cfg.M, "Marangoni number");
  sc_sv->add_option("--amplitude", cfg.amplitude, "predictor amplitude");
  sc_sv->add_option("--n-modes", cfg.n_modes, "cosine modes");

  auto* sc_cb = add_common(app.add_subcommand(
      "continue-branch", "trace the solution branch toward rupture"));
  sc_cb->add_option("--g", cfg.g, "gravity number");
  sc_cb->add_option("--k0", cfg.k0, "fundamental wavenumber");
  sc_cb->add_option("--ds", cfg.ds, "initial arclength step");
  sc_cb->add_option("--max-steps", cfg.max_steps, "branch point budget");
  sc_cb->add_option("--rupture-threshold", cfg.rupture_threshold,
                    "stop when min h drops below this");
  sc_cb->add_option("--n-modes", cfg.n_modes, "initial cosine modes");

  auto* sc_sp = add_common(app.add_subcommand(
      "spectrum", "linearization spectrum about a branch point"));
  sc_sp->add_option("--g", cfg.g, "gravity number");
  sc_sp->add_option("--branch-file", cfg.branch_file,
                    "directory written by continue-branch");
  sc_sp->add_option("--point-index", cfg.point_index,
                    "branch point (-1 for the last)");
  sc_sp->add_flag("--bloch-sweep", cfg.bloch_sweep,
                  "sweep transverse wavenumbers");
  sc_sp->add_option("--samples", cfg.samples, "sweep resolution");
  sc_sp->add_option("--n-modes", cfg.n_modes, "eigenvalues reported");

  auto* sc_ev = add_common(
      app.add_subcommand("evolve", "time evolution of the film equation"));
  sc_ev->add_option("--g", cfg.g, "gravity number");
  sc_ev->add_option("--k0", cfg.k0, "fundamental wavenumber");
  sc_ev->add_option("--M", cfg.M, "Marangoni number");
  sc_ev->add_option("--amplitude", cfg.amplitude, "initial mode amplitude");
  sc_ev->add_option("--mode", cfg.mode_ell, "initial mode index");
  sc_ev->add_option("--grid", cfg.grid, "spatial points");
  sc_ev->add_option("--dt", cfg.dt, "requested time step");
  sc_ev->add_option("--t-end", cfg.t_end, "final time");
  sc_ev->add_option("--snapshot-every", cfg.snapshot_every,
                    "steps between snapshots");

  auto* sc_am = add_common(app.add_subcommand(
      "amplitude", "time evolution of the long-wave amplitude equation"));
  sc_am->add_option("--g", cfg.g, "gravity number");
  sc_am->add_option("--k0", cfg.k0, "fundamental wavenumber");
  sc_am->add_option("--amplitude", cfg.amplitude, "initial mode amplitude");
  sc_am->add_option("--mode", cfg.mode_ell, "initial mode index");
  sc_am->add_option("--grid", cfg.grid, "spatial points");
  sc_am->add_option("--dt", cfg.dt, "time step");
  sc_am->add_option("--t-end", cfg.t_end, "final time");
  sc_am->add_option("--snapshot-every", cfg.snapshot_every,
                    "steps between snapshots");

  add_common(app.add_subcommand("verify", "run the acceptance suite"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* active = app.get_subcommands().front();
  if (auto* o = active->get_option_no_throw("--E"); o && o->count())
    cfg.E_set = true;
  if (auto* o = active->get_option_no_throw("--K"); o && o->count())
    cfg.K_set = true;

  if (const char* env = std::getenv("THINFILM_OUTDIR")) cfg.out_dir = env;

  // one validation path: the echo must itself parse cleanly
  try {
    bool e_set = cfg.E_set, k_set = cfg.K_set;
    cfg = parse_config(echo_config(cfg));
    cfg.E_set = e_set;
    cfg.K_set = k_set;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::string name = active->get_name();
  try {
    write_echo(cfg);
    if (name == "fixed-points") return cmd_fixed_points(cfg);
    if (name == "period") return cmd_period(cfg);
    if (name == "phase-portrait") return cmd_phase_portrait(cfg);
    if (name == "solve") return cmd_solve(cfg);
    if (name == "continue-branch") return cmd_continue_branch(cfg);
    if (name == "spectrum") return cmd_spectrum(cfg);
    if (name == "evolve") return cmd_evolve(cfg);
    if (name == "amplitude") return cmd_amplitude(cfg);
    if (name == "verify") return cmd_verify(cfg);
    std::cerr << "config error: unknown subcommand " << name << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}
