#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mdbd/dynamics.hpp"
#include "mdbd/saddle.hpp"

namespace mdbd {

enum class Scheme { ExplicitEuler, RungeKutta4 };
enum class Algorithm { Mdbd, ProjectionBaseline };

struct IntegratorConfig {
  double step = 1e-3;
  double horizon = 50.0;
  int record_every = 100;
  Scheme scheme = Scheme::ExplicitEuler;
  double divergence_bound = 1e9;
};

/// Selected vector field: the MDBD flows or the projection baseline, with
/// the projection cost mode threaded through for timing studies.
struct Dynamics {
  const NetworkProblem* net = nullptr;
  Algorithm algorithm = Algorithm::Mdbd;
  ProjectionMode projection_mode = ProjectionMode::Fast;

  // Baseline runs evaluate against a quadratic-generator copy built once.
  explicit Dynamics(const NetworkProblem& problem,
                    Algorithm alg = Algorithm::Mdbd,
                    ProjectionMode mode = ProjectionMode::Fast);

  const NetworkProblem& effective_problem() const;
  StackedState eval(const StackedState& s) const;
  OutputState output(const StackedState& s) const;

 private:
  NetworkProblem quadratic_net_;
};

/// Running time-averages maintained by the trapezoid rule.
struct ErgodicAverages {
  Eigen::MatrixXd x_hat, lambda_hat, mu_hat, omega_hat, nu_hat;
};

struct DiagnosticsRow {
  double t = 0.0;
  double v1 = 0.0;  // NaN when no reference saddle is supplied
  double kkt_residual = 0.0;
  double ineq_residual = 0.0;  // ||[sum g_i(x_i)]^+||
  double eq_residual = 0.0;    // ||sum A_i x_i - b||
  double s_norm = 0.0;
  double gap = 0.0;  // ergodic duality gap vs the reference, NaN without one
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<StackedState> states;
  std::vector<OutputState> outputs;
  std::vector<ErgodicAverages> averages;
  std::vector<DiagnosticsRow> diagnostics;
  bool diverged = false;
};

/// One Euler or RK4 update of s (same subgradient-selection rule at the
/// intermediate stages).
StackedState step(const Dynamics& dyn, const StackedState& s, double h,
                  Scheme scheme);

TrajectoryRecord integrate(const Dynamics& dyn, const StackedState& s0,
                           const IntegratorConfig& cfg,
                           const SaddlePoint* reference = nullptr);

/// V1 = sum_i D_{phi_i^*} + half squared distances of the remaining blocks
/// to the reference, via the conjugate-free identity
/// D_{phi_i^*} = phi_i(x*_i) - phi_i(x_i) - (x*_i - x_i)' y_i.
double lyapunov_v1(const NetworkProblem& net, const StackedState& s,
                   const OutputState& z, const SaddlePoint& ref);

/// L(x_hat, lambda*, mu*, omega_hat, nu_hat) - L(x*, lambda_hat, mu_hat,
/// omega*, nu*), clamped at zero for tiny negative round-off.
double duality_gap(const NetworkProblem& net, const ErgodicAverages& avg,
                   const SaddlePoint& ref);

}  // namespace mdbd
