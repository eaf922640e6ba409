#include "thinfilm/solver.hpp"

#include <cmath>
#include <numbers>

#include "thinfilm/numerics.hpp"
#include "thinfilm/phase.hpp"

namespace thinfilm {

CollocationSystem::CollocationSystem(double g, double k0, int N, int Nc)
    : g_(g), k0_(k0), N_(N), Nc_(Nc == 0 ? 4 * N : Nc) {
  if (!(g > 0.0) || !(k0 > 0.0))
    throw domain_error("CollocationSystem: g and k0 must be positive");
  if (N_ < 1) throw domain_error("CollocationSystem: N must be positive");
  if (Nc_ < 2 * N_ + 1)
    throw domain_error("CollocationSystem: need at least 2N+1 grid points");

  x_ = PeriodicProfile::grid(k0_, Nc_);
  C_.resize(Nc_, N_);
  P_.resize(N_, Nc_);
  lam2_.resize(N_);
  for (int l = 0; l < N_; ++l) {
    double lam = (l + 1) * k0_;
    lam2_(l) = lam * lam;
    for (int j = 0; j < Nc_; ++j) {
      double c = std::cos(lam * x_[j]);
      C_(j, l) = c;
      P_(l, j) = 2.0 * c / Nc_;
    }
  }
}

Eigen::VectorXd CollocationSystem::values(const Eigen::VectorXd& a) const {
  return C_ * a;
}

PeriodicProfile CollocationSystem::profile(const Eigen::VectorXd& a) const {
  return PeriodicProfile(k0_, std::vector<double>(a.data(), a.data() + a.size()));
}

Eigen::VectorXd CollocationSystem::coeffs_of(const PeriodicProfile& v) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(N_);
  int m = std::min(N_, v.modes());
  for (int l = 0; l < m; ++l) a(l) = v.coeffs()[l];
  return a;
}

void CollocationSystem::check_positive(const Eigen::VectorXd& vals) const {
  if ((1.0 + vals.array()).minCoeff() <= 0.0)
    throw domain_error("collocation: film thickness not positive on the grid");
}

Eigen::VectorXd CollocationSystem::residual(const Eigen::VectorXd& a,
                                            double M) const {
  Eigen::VectorXd v = values(a);
  check_positive(v);
  Eigen::VectorXd w(Nc_);
  for (int j = 0; j < Nc_; ++j) w(j) = omega(v(j));
  // the K(v) term is constant in x and projects to zero on modes l >= 1;
  // centering makes the trivial state map to zero exactly
  double w0 = w(0);
  w.array() -= w0;
  return (-(lam2_.array() + g_) * a.array()).matrix() + M * (P_ * w);
}

Eigen::MatrixXd CollocationSystem::jacobian(const Eigen::VectorXd& a,
                                            double M) const {
  Eigen::VectorXd v = values(a);
  check_positive(v);
  Eigen::VectorXd wp(Nc_);
  for (int j = 0; j < Nc_; ++j) wp(j) = omega_prime(v(j));
  // dK/da also projects to zero on modes l >= 1
  Eigen::MatrixXd J = M * P_ * wp.asDiagonal() * C_;
  J.diagonal() -= (lam2_.array() + g_).matrix();
  return J;
}

Eigen::VectorXd CollocationSystem::dresidual_dM(const Eigen::VectorXd& a) const {
  Eigen::VectorXd v = values(a);
  check_positive(v);
  Eigen::VectorXd w(Nc_);
  for (int j = 0; j < Nc_; ++j) w(j) = omega(v(j));
  double w0 = w(0);
  w.array() -= w0;
  return P_ * w;
}

Eigen::VectorXd CollocationSystem::newton_solve(const Eigen::VectorXd& guess,
                                                double M, double residual_tol,
                                                int max_iter,
                                                int* iters_out) const {
  Eigen::VectorXd a = guess;
  if ((1.0 + values(a).array()).minCoeff() <= positivity_floor)
    throw numerical_error("newton_solve: guess violates the positivity floor");
  for (int it = 0; it < max_iter; ++it) {
    if (iters_out) *iters_out = it;
    Eigen::VectorXd r = residual(a, M);
    double rn = r.lpNorm<Eigen::Infinity>();
    if (rn < residual_tol) return a;
    Eigen::VectorXd da = jacobian(a, M).partialPivLu().solve(-r);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60 && !accepted; ++h) {
      Eigen::VectorXd cand = a + step * da;
      if ((1.0 + values(cand).array()).minCoeff() > positivity_floor) {
        double rc = residual(cand, M).lpNorm<Eigen::Infinity>();
        if (rc < rn || h >= 30) {
          a = cand;
          accepted = true;
        }
      }
      step *= 0.5;
    }
    if (!accepted)
      throw numerical_error("newton_solve: positivity collapse during damping");
  }
  if (iters_out) *iters_out = max_iter;
  if (residual(a, M).lpNorm<Eigen::Infinity>() < residual_tol) return a;
  throw numerical_error("newton_solve: no convergence");
}

namespace {

enum class OrbitState { no_orbit, neg_mean, pos_mean };

struct StateEval {
  OrbitState state = OrbitState::no_orbit;
  double E = 0.0;
  double mean = 0.0;
};

StateEval eval_state(double K, double M, double g, double T_target) {
  HamiltonianParams hp{g, M, K};
  EnergyInterval ei;
  try {
    ei = energy_interval(hp);
  } catch (const domain_error&) {
    return {};
  }
  double range = ei.E_max - ei.E_min;
  if (!(range > 0.0)) return {};
  // close to the interval ends E - G(v) drops to rounding level and the
  // orbit quadrature turns unreliable; keep a relative margin
  double Elo = ei.E_min + 1e-9 * range;
  double Ehi = ei.E_max - 1e-9 * range;
  auto excess = [&](double E) { return period(E, hp) - T_target; };
  try {
    if (excess(Elo) >= 0.0) return {};
    if (excess(Ehi) <= 0.0) return {};
    double E = find_root(excess, Elo, Ehi);
    double mean = orbit_quadrature(E, hp).mean_v;
    StateEval se;
    se.state = mean <= 0.0 ? OrbitState::neg_mean : OrbitState::pos_mean;
    se.E = E;
    se.mean = mean;
    return se;
  } catch (const domain_error&) {
    return {};
  } catch (const numerical_error&) {
    return {};
  }
}

}  // namespace

ShootResult shoot_solution(double M, const ModelParams& p,
                           double amplitude_hint) {
  ModelParams q = p;
  q.M = M;
  q.validate();
  if (!(amplitude_hint > 0.0))
    throw domain_error("shoot_solution: amplitude hint must be positive");
  if (M >= p.M_star_k0() - 1e-12)
    throw numerical_error(
        "shoot_solution: no small periodic orbit of the required period at or "
        "above the critical Marangoni number");

  double g = p.g, k0 = p.k0;
  double T_target = 2.0 * std::numbers::pi / k0;

  // scan K downward from K0 for the sign change of the orbit mean
  double d_lo = std::max(amplitude_hint * amplitude_hint / 100.0, 1e-10);
  double d_hi = 1.0;
  int found = -1;
  std::vector<double> deltas;
  for (int attempt = 0; attempt < 4 && found < 0; ++attempt) {
    int n = 160;
    deltas.resize(n);
    double r = std::pow(d_hi / d_lo, 1.0 / (n - 1));
    for (int i = 0; i < n; ++i) deltas[i] = d_lo * std::pow(r, i);
    for (int i = 0; i < n; ++i) {
      auto se = eval_state(K0 - deltas[i], M, g, T_target);
      if (se.state == OrbitState::pos_mean) {
        found = i;
        break;
      }
    }
    if (found == 0) {
      d_lo /= 100.0;
      found = -1;
    } else if (found < 0) {
      break;
    }
  }
  if (found <= 0)
    throw numerical_error("shoot_solution: no mean-zero orbit found in the "
                          "admissible mass-constant range");

  double lo = deltas[found - 1], hi = deltas[found];
  for (int it = 0; it < 80 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    auto se = eval_state(K0 - mid, M, g, T_target);
    (se.state == OrbitState::pos_mean ? hi : lo) = mid;
  }
  double K = K0 - 0.5 * (lo + hi);
  auto se = eval_state(K, M, g, T_target);
  if (se.state == OrbitState::no_orbit)
    throw numerical_error("shoot_solution: orbit lost at the bisected mass "
                          "constant");
  HamiltonianParams hp{g, M, K};
  auto tp = turning_points(se.E, hp);

  // sample the even half-orbit from its maximum and project onto cosines
  int nx = 128, nsub = 400, N = 64;
  double dxs = (0.5 * T_target) / (nx * nsub);
  std::vector<double> vnode(nx + 1);
  double v = tp.q1, w = 0.0;
  vnode[0] = v;
  auto rhs = [&](double vv, double ww, double& dv, double& dw) {
    dv = ww;
    dw = -potential_G(vv, hp, 1);
  };
  for (int j = 0; j < nx; ++j) {
    for (int s = 0; s < nsub; ++s) {
      double k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
      rhs(v, w, k1v, k1w);
      rhs(v + 0.5 * dxs * k1v, w + 0.5 * dxs * k1w, k2v, k2w);
      rhs(v + 0.5 * dxs * k2v, w + 0.5 * dxs * k2w, k3v, k3w);
      rhs(v + dxs * k3v, w + dxs * k3w, k4v, k4w);
      v += dxs * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0;
      w += dxs * (k1w + 2.0 * k2w + 2.0 * k3w + k4w) / 6.0;
    }
    vnode[j + 1] = v;
  }

  std::vector<double> a(N);
  double half = 0.5 * T_target;
  for (int l = 1; l <= N; ++l) {
    double s = 0.5 * vnode[0];
    for (int j = 1; j < nx; ++j)
      s += vnode[j] * std::cos(l * k0 * (half * j / nx));
    s += 0.5 * vnode[nx] * std::cos(l * std::numbers::pi);
    a[l - 1] = 2.0 * s / nx;
  }
  return {PeriodicProfile(k0, std::move(a)), K, se.E};
}

}  // namespace thinfilm
