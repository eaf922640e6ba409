#pragma once

#include <Eigen/Dense>

#include "thinfilm/model.hpp"

namespace thinfilm {

// even cosine collocation for v'' - g v + M (omega(v) - K(v)) = 0 in
// coefficient space; coefficient l of a vector a is the amplitude of
// cos((l+1) k0 x)
class CollocationSystem {
 public:
  CollocationSystem(double g, double k0, int N, int Nc = 0);

  double g() const { return g_; }
  double k0() const { return k0_; }
  int N() const { return N_; }
  int Nc() const { return Nc_; }
  const std::vector<double>& grid() const { return x_; }

  Eigen::VectorXd values(const Eigen::VectorXd& a) const;
  PeriodicProfile profile(const Eigen::VectorXd& a) const;
  Eigen::VectorXd coeffs_of(const PeriodicProfile& v) const;

  Eigen::VectorXd residual(const Eigen::VectorXd& a, double M) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& a, double M) const;
  Eigen::VectorXd dresidual_dM(const Eigen::VectorXd& a) const;

  // damped Newton at fixed M, residual_tol on the sup norm of the residual
  Eigen::VectorXd newton_solve(const Eigen::VectorXd& guess, double M,
                               double residual_tol = 1e-11, int max_iter = 50,
                               int* iters_out = nullptr) const;

  static constexpr double positivity_floor = 1e-6;

 private:
  void check_positive(const Eigen::VectorXd& vals) const;

  double g_, k0_;
  int N_, Nc_;
  std::vector<double> x_;
  Eigen::MatrixXd C_;    // Nc x N evaluation matrix
  Eigen::MatrixXd P_;    // N x Nc projection matrix
  Eigen::VectorXd lam2_; // (l k0)^2
};

struct ShootResult {
  PeriodicProfile profile;
  double K = 0.0;
  double E = 0.0;
};

// phase-plane shooting oracle: finds the even, mean-zero, period-2pi/k0
// orbit at Marangoni number M by bisecting the mass constant K
ShootResult shoot_solution(double M, const ModelParams& p,
                           double amplitude_hint);

}  // namespace thinfilm
