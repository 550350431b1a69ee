#include "mdbd/oracle.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mdbd {

namespace {

// Gradient of the centralized augmented Lagrangian w.r.t. agent i's block.
// On sets contained in the nonnegative orthant the l1 terms are linear
// (||x||_1 = 1'x), so the objective is smooth there.
struct AugLagrangian {
  const NetworkProblem& net;
  Eigen::VectorXd lambda;  // p
  Eigen::VectorXd mu;      // q
  double rho = 1.0;

  Eigen::VectorXd ineq(const Eigen::MatrixXd& x) const { return inequality_sum(net, x); }
  Eigen::VectorXd eq(const Eigen::MatrixXd& x) const { return equality_residual(net, x); }

  double value(const Eigen::MatrixXd& x) const {
    double v = 0.0;
    for (int i = 0; i < net.n_agents(); ++i) v += eval_cost(net.agents[i], x.col(i));
    const Eigen::VectorXd gp = (lambda + rho * ineq(x)).cwiseMax(0.0);
    v += (gp.squaredNorm() - lambda.squaredNorm()) / (2.0 * rho);
    const Eigen::VectorXd e = eq(x);
    v += mu.dot(e) + 0.5 * rho * e.squaredNorm();
    return v;
  }

  Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const {
    const Eigen::VectorXd lam_eff = (lambda + rho * ineq(x)).cwiseMax(0.0);
    const Eigen::VectorXd mu_eff = mu + rho * eq(x);
    Eigen::MatrixXd g(x.rows(), x.cols());
    for (int i = 0; i < net.n_agents(); ++i) {
      const auto& a = net.agents[i];
      g.col(i) = subgrad_cost(a, x.col(i)) +
                 subgrad_ineq(a, x.col(i)).transpose() * lam_eff +
                 a.eq_matrix.transpose() * mu_eff;
    }
    return g;
  }
};

Eigen::MatrixXd project_blocks(const NetworkProblem& net, Eigen::MatrixXd x) {
  for (int i = 0; i < net.n_agents(); ++i)
    x.col(i) = euclidean_project(net.agents[i].set, x.col(i));
  return x;
}

// FISTA with backtracking and gradient restart.
Eigen::MatrixXd fista(const NetworkProblem& net, const AugLagrangian& al,
                      Eigen::MatrixXd x, int max_iters, double grad_map_tol) {
  double lip = 1.0;
  Eigen::MatrixXd v = x;
  double theta = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd grad = al.gradient(v);
    const double fv = al.value(v);
    Eigen::MatrixXd x_next;
    for (int bt = 0; bt < 60; ++bt) {
      x_next = project_blocks(net, v - grad / lip);
      const Eigen::MatrixXd d = x_next - v;
      if (al.value(x_next) <= fv + grad.cwiseProduct(d).sum() +
                                  0.5 * lip * d.squaredNorm() + 1e-14)
        break;
      lip *= 2.0;
    }
    const double theta_next =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    Eigen::MatrixXd x_prev = x;
    x = x_next;
    v = x + ((theta - 1.0) / theta_next) * (x - x_prev);
    theta = theta_next;
    if (grad.cwiseProduct(x - x_prev).sum() > 0.0) {  // restart
      v = x;
      theta = 1.0;
    }
    const double gm =
        lip * (x - project_blocks(net, x - al.gradient(x) / lip)).norm();
    if (gm < grad_map_tol) break;
    lip = std::max(lip * 0.9, 1e-6);
  }
  return x;
}

// Active-set Newton refinement of the centralized KKT system. The AL phase
// identifies the active coordinates and constraint rows to ~1e-3; the
// reduced stationarity/feasibility system is then smooth (the l1 terms are
// linear at fixed signs), so Newton reaches machine precision in a few
// steps. Supports simplex and box local sets; returns false when it cannot
// improve the point, leaving the inputs untouched.
bool newton_polish(const NetworkProblem& net, Eigen::MatrixXd& x,
                   Eigen::VectorXd& lambda, Eigen::VectorXd& mu,
                   double act_tol) {
  const int nn = net.n_agents();
  const int n = net.dim_n(), p = net.dim_p(), q = net.dim_q();
  for (const auto& a : net.agents)
    if (a.set.kind != SetKind::UnitSimplex && a.set.kind != SetKind::Box)
      return false;
  // Pin state per coordinate: -1 free, otherwise the pinned value.
  Eigen::MatrixXd pin = Eigen::MatrixXd::Constant(n, nn, -1.0);
  for (int i = 0; i < nn; ++i) {
    const auto& set = net.agents[i].set;
    for (int k = 0; k < n; ++k) {
      if (set.kind == SetKind::UnitSimplex) {
        if (x(k, i) < act_tol) pin(k, i) = 0.0;
      } else {
        if (x(k, i) < set.lower[k] + act_tol) pin(k, i) = set.lower[k];
        else if (x(k, i) > set.upper[k] - act_tol) pin(k, i) = set.upper[k];
      }
    }
  }
  std::vector<bool> ineq_active(p);
  {
    const Eigen::VectorXd g = inequality_sum(net, x);
    for (int r = 0; r < p; ++r)
      ineq_active[r] = lambda[r] > act_tol || g[r] > -act_tol;
  }

  Eigen::MatrixXd best_x = x;
  Eigen::VectorXd best_lambda = lambda, best_mu = mu;
  bool improved = false;

  for (int round = 0; round < 40; ++round) {
    std::vector<std::vector<int>> free_idx(nn);
    int n_free = 0, n_act = 0;
    for (int i = 0; i < nn; ++i)
      for (int k = 0; k < n; ++k)
        if (pin(k, i) < 0.0) {
          free_idx[i].push_back(k);
          ++n_free;
        }
    std::vector<int> act_rows;
    for (int r = 0; r < p; ++r)
      if (ineq_active[r]) act_rows.push_back(r);
    n_act = static_cast<int>(act_rows.size());
    int n_theta = 0;  // one simplex multiplier per simplex agent
    for (int i = 0; i < nn; ++i)
      if (net.agents[i].set.kind == SetKind::UnitSimplex) ++n_theta;
    const int dim = n_free + n_act + q + n_theta;
    if (dim == 0) return false;

    auto unpack = [&](const Eigen::VectorXd& u, Eigen::MatrixXd& xx,
                      Eigen::VectorXd& lam, Eigen::VectorXd& muu,
                      Eigen::VectorXd& theta) {
      int pos = 0;
      xx.resize(n, nn);
      for (int i = 0; i < nn; ++i)
        for (int k = 0; k < n; ++k)
          xx(k, i) = pin(k, i) >= 0.0 ? pin(k, i) : u[pos++];
      lam = Eigen::VectorXd::Zero(p);
      for (int r : act_rows) lam[r] = u[pos++];
      muu = u.segment(pos, q);
      pos += q;
      theta = u.segment(pos, n_theta);
    };

    auto residual = [&](const Eigen::VectorXd& u) {
      Eigen::MatrixXd xx;
      Eigen::VectorXd lam, muu, theta;
      unpack(u, xx, lam, muu, theta);
      Eigen::VectorXd r(dim);
      int pos = 0, th = 0;
      for (int i = 0; i < nn; ++i) {
        const auto& a = net.agents[i];
        const bool simplex = a.set.kind == SetKind::UnitSimplex;
        if (!free_idx[i].empty()) {
          const Eigen::VectorXd grad =
              subgrad_cost(a, xx.col(i)) +
              subgrad_ineq(a, xx.col(i)).transpose() * lam +
              a.eq_matrix.transpose() * muu;
          for (int k : free_idx[i])
            r[pos++] = grad[k] + (simplex ? theta[th] : 0.0);
        }
        if (simplex) ++th;
      }
      const Eigen::VectorXd g = inequality_sum(net, xx);
      for (int row : act_rows) r[pos++] = g[row];
      r.segment(pos, q) = equality_residual(net, xx);
      pos += q;
      for (int i = 0; i < nn; ++i)
        if (net.agents[i].set.kind == SetKind::UnitSimplex)
          r[pos++] = xx.col(i).sum() - 1.0;
      return r;
    };

    // Pack the warm start; theta from the mean free-coordinate gradient.
    Eigen::VectorXd u(dim);
    {
      int pos = 0;
      for (int i = 0; i < nn; ++i)
        for (int k : free_idx[i]) u[pos++] = x(k, i);
      for (int r : act_rows) u[pos++] = lambda[r];
      u.segment(pos, q) = mu;
      pos += q;
      for (int i = 0; i < nn; ++i) {
        const auto& a = net.agents[i];
        if (a.set.kind != SetKind::UnitSimplex) continue;
        double theta0 = 0.0;
        if (!free_idx[i].empty()) {
          const Eigen::VectorXd grad =
              subgrad_cost(a, x.col(i)) +
              subgrad_ineq(a, x.col(i)).transpose() * lambda +
              a.eq_matrix.transpose() * mu;
          for (int k : free_idx[i]) theta0 -= grad[k];
          theta0 /= static_cast<double>(free_idx[i].size());
        }
        u[pos++] = theta0;
      }
    }

    // Map each free unknown back to its (agent, coordinate) pair for the
    // ratio test below.
    std::vector<std::pair<int, int>> free_map;
    free_map.reserve(n_free);
    for (int i = 0; i < nn; ++i)
      for (int k : free_idx[i]) free_map.emplace_back(i, k);

    bool converged = false;
    bool blocked = false;
    int block_agent = -1, block_coord = -1;
    double block_value = 0.0;
    for (int it = 0; it < 60 && !blocked; ++it) {
      const Eigen::VectorXd r = residual(u);
      const double rnorm = r.norm();
      if (r.lpNorm<Eigen::Infinity>() < 1e-13) {
        converged = true;
        break;
      }
      Eigen::MatrixXd jac(dim, dim);
      for (int j = 0; j < dim; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(u[j]));
        Eigen::VectorXd up = u, um = u;
        up[j] += h;
        um[j] -= h;
        jac.col(j) = (residual(up) - residual(um)) / (2.0 * h);
      }
      const Eigen::VectorXd du = jac.colPivHouseholderQr().solve(r);
      if (!du.allFinite()) break;

      // Ratio test: the Newton step may push a free coordinate through its
      // bound (the warm start guessed the active set wrong, typically in a
      // nearly flat valley of the cost). Step exactly to the first blocking
      // bound, pin that coordinate, and restart with the corrected set.
      double t_max = 1.0;
      for (int j = 0; j < n_free; ++j) {
        const auto [i, k] = free_map[j];
        const auto& set = net.agents[i].set;
        const double lower =
            set.kind == SetKind::UnitSimplex ? 0.0 : set.lower[k];
        const double upper = set.kind == SetKind::UnitSimplex
                                 ? std::numeric_limits<double>::infinity()
                                 : set.upper[k];
        double t_j = 1.0;
        if (du[j] > 0.0 && u[j] - du[j] < lower)
          t_j = (u[j] - lower) / du[j];
        else if (du[j] < 0.0 && u[j] - du[j] > upper)
          t_j = (u[j] - upper) / du[j];
        if (t_j < t_max) {
          t_max = t_j;
          block_agent = i;
          block_coord = k;
          block_value = du[j] > 0.0 ? lower : upper;
        }
      }
      if (t_max < 1.0 - 1e-12) {
        u -= t_max * du;
        blocked = true;
        break;
      }

      // Full step, with a short backoff in case of nonlinearity from the
      // active inequality rows.
      double t = 1.0;
      Eigen::VectorXd u_next = u - du;
      while (t > 1e-4 && residual(u_next).norm() > (1.0 - 0.25 * t) * rnorm) {
        t *= 0.5;
        u_next = u - t * du;
      }
      if (t <= 1e-4) break;
      const double step_size = (t * du).lpNorm<Eigen::Infinity>();
      u = u_next;
      if (step_size < 1e-14) {
        converged = residual(u).lpNorm<Eigen::Infinity>() < 1e-10;
        break;
      }
    }

    if (blocked) {
      Eigen::MatrixXd xx;
      Eigen::VectorXd lam, muu, theta;
      unpack(u, xx, lam, muu, theta);
      xx(block_coord, block_agent) = block_value;
      pin(block_coord, block_agent) = block_value;
      x = xx;
      lambda = lam.cwiseMax(0.0);
      mu = muu;
      continue;
    }
    if (!converged) break;

    Eigen::MatrixXd xx;
    Eigen::VectorXd lam, muu, theta;
    unpack(u, xx, lam, muu, theta);

    // Active-set corrections: pin free coordinates that crossed their
    // bound, release pinned ones with the wrong reduced gradient sign, and
    // flip inequality rows with sign violations.
    bool changed = false;
    int th = 0;
    for (int i = 0; i < nn; ++i) {
      const auto& a = net.agents[i];
      const bool simplex = a.set.kind == SetKind::UnitSimplex;
      const Eigen::VectorXd grad = subgrad_cost(a, xx.col(i)) +
                                   subgrad_ineq(a, xx.col(i)).transpose() * lam +
                                   a.eq_matrix.transpose() * muu;
      for (int k = 0; k < n; ++k) {
        if (pin(k, i) < 0.0) {
          if (simplex && xx(k, i) < 1e-10) {
            pin(k, i) = 0.0;
            changed = true;
          } else if (!simplex && xx(k, i) < a.set.lower[k] - 1e-12) {
            pin(k, i) = a.set.lower[k];
            changed = true;
          } else if (!simplex && xx(k, i) > a.set.upper[k] + 1e-12) {
            pin(k, i) = a.set.upper[k];
            changed = true;
          }
        } else {
          const double reduced =
              grad[k] + (simplex ? theta[th] : 0.0);
          const bool at_lower = simplex || pin(k, i) == a.set.lower[k];
          if ((at_lower && reduced < -1e-10) || (!at_lower && reduced > 1e-10)) {
            pin(k, i) = -1.0;
            changed = true;
          }
        }
      }
      if (simplex) ++th;
    }
    const Eigen::VectorXd g_all = inequality_sum(net, xx);
    for (int r = 0; r < p; ++r) {
      if (ineq_active[r] && lam[r] < -1e-12) {
        ineq_active[r] = false;
        changed = true;
      } else if (!ineq_active[r] && g_all[r] > 1e-10) {
        ineq_active[r] = true;
        changed = true;
      }
    }

    best_x = xx;
    best_lambda = lam.cwiseMax(0.0);
    best_mu = muu;
    improved = true;
    if (!changed) break;
    x = xx;
    lambda = best_lambda;
    mu = muu;
  }

  if (!improved) return false;
  x = best_x;
  lambda = best_lambda;
  mu = best_mu;
  return true;
}

// Per-component Laplacian solve lifting a consensus residual to auxiliary
// variables: returns M with M * L = rows (pseudo-inverse, zero-mean rows).
Eigen::MatrixXd consensus_lift(const Eigen::MatrixXd& laplacian_mat,
                               Eigen::MatrixXd rows) {
  if (rows.rows() == 0) return rows;
  rows.colwise() -= rows.rowwise().mean();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(laplacian_mat);
  // L symmetric: solve L m_r = row_r for each row.
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (int r = 0; r < rows.rows(); ++r)
    out.row(r) = cod.solve(rows.row(r).transpose()).transpose();
  return out;
}

}  // namespace

SaddlePoint solve_reference(const NetworkProblem& net, double tol,
                            OracleOptions opts) {
  net.validate();
  const int nn = net.n_agents();
  const int p = net.dim_p(), q = net.dim_q();

  // Start from the analytic center-ish interior point of each set.
  Eigen::MatrixXd x(net.dim_n(), nn);
  for (int i = 0; i < nn; ++i) {
    const auto& set = net.agents[i].set;
    switch (set.kind) {
      case SetKind::UnitSimplex:
        x.col(i).setConstant(1.0 / set.dim);
        break;
      case SetKind::Box:
        x.col(i) = 0.5 * (set.lower + set.upper);
        break;
      case SetKind::Ball:
        x.col(i) = set.center;
        break;
      case SetKind::NonnegativeOrthant:
        x.col(i).setOnes();
        break;
    }
  }
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(q);

  // Phase 1: projected primal-dual subgradient, diminishing steps.
  for (int k = 0; k < opts.subgradient_iters; ++k) {
    const double alpha = opts.step_a / (k + opts.step_b);
    Eigen::MatrixXd x_next(x.rows(), x.cols());
    for (int i = 0; i < nn; ++i) {
      const auto& a = net.agents[i];
      Eigen::VectorXd d = subgrad_cost(a, x.col(i)) +
                          subgrad_ineq(a, x.col(i)).transpose() * lambda +
                          a.eq_matrix.transpose() * mu;
      x_next.col(i) = euclidean_project(a.set, x.col(i) - alpha * d);
    }
    lambda = (lambda + alpha * inequality_sum(net, x)).cwiseMax(0.0);
    mu += alpha * equality_residual(net, x);
    x = x_next;
  }

  // Phase 2: augmented-Lagrangian polish with accelerated inner solves.
  AugLagrangian al{net, lambda, mu, opts.rho0};
  for (int outer = 0; outer < opts.outer_iters; ++outer) {
    x = fista(net, al, x, opts.inner_iters, std::min(tol * 1e-2, 1e-10));
    const Eigen::VectorXd g = al.ineq(x);
    const Eigen::VectorXd e = al.eq(x);
    al.lambda = (al.lambda + al.rho * g).cwiseMax(0.0);
    al.mu += al.rho * e;
    if (g.cwiseMax(0.0).norm() < tol * 1e-2 && e.norm() < tol * 1e-2 &&
        outer > 4)
      break;
    al.rho = std::min(al.rho * 2.0, opts.rho_max);
  }
  lambda = al.lambda;
  mu = al.mu;

  // Lift the centralized multipliers to the distributed saddle: consensus
  // lambda/mu, auxiliary omega/nu solving the Laplacian systems that zero
  // the corresponding operator blocks.
  const Eigen::MatrixXd lap = laplacian(net.graph);
  auto make_saddle = [&](const Eigen::MatrixXd& xx, const Eigen::VectorXd& lam,
                         const Eigen::VectorXd& muu) {
    SaddlePoint sp;
    sp.z_star.x = xx;
    sp.z_star.lambda = lam.replicate(1, nn);
    sp.z_star.mu = muu.replicate(1, nn);
    Eigen::MatrixXd g_cols(p, nn), e_cols(q, nn);
    for (int i = 0; i < nn; ++i) {
      g_cols.col(i) = eval_ineq(net.agents[i], xx.col(i));
      e_cols.col(i) =
          net.agents[i].eq_matrix * xx.col(i) - net.agents[i].eq_offset;
    }
    sp.z_star.omega = consensus_lift(lap, g_cols);
    sp.z_star.nu = consensus_lift(lap, e_cols);
    sp.s_star = mirror_preimage(net, sp.z_star);
    sp.optimal_value = 0.0;
    for (int i = 0; i < nn; ++i)
      sp.optimal_value += eval_cost(net.agents[i], xx.col(i));
    sp.achieved_residual = kkt_residual(net, sp.z_star);
    return sp;
  };

  SaddlePoint best = make_saddle(x, lambda, mu);
  best.method = "subgradient + augmented Lagrangian";
  if (opts.polish) {
    // The activity threshold separating boundary from interior coordinates
    // depends on how far the AL point is; try a few and keep the best.
    for (double act_tol : {1e-6, 1e-4, 1e-3, 1e-2}) {
      if (best.achieved_residual <= tol) break;
      Eigen::MatrixXd xp = x;
      Eigen::VectorXd lamp = lambda, mup = mu;
      if (!newton_polish(net, xp, lamp, mup, act_tol)) continue;
      SaddlePoint cand = make_saddle(xp, lamp, mup);
      if (cand.achieved_residual < best.achieved_residual) {
        best = std::move(cand);
        best.method = "subgradient + augmented Lagrangian + active-set Newton";
      }
    }
  }
  best.tolerance = tol;
  best.seed = opts.seed;
  if (best.achieved_residual > tol)
    throw std::runtime_error("solve_reference: did not reach tolerance, best "
                             "residual " + std::to_string(best.achieved_residual));
  return best;
}

Eigen::MatrixXd mesh_search(const NetworkProblem& net, double resolution,
                            double ineq_tol, double eq_tol) {
  net.validate();
  const int nn = net.n_agents();
  const int n = net.dim_n();

  int free_dims = 0;
  for (const auto& a : net.agents) {
    switch (a.set.kind) {
      case SetKind::UnitSimplex: free_dims += a.set.dim - 1; break;
      case SetKind::Box: free_dims += a.set.dim; break;
      default:
        throw std::invalid_argument("mesh_search: unsupported set kind");
    }
  }
  if (free_dims > 3)
    throw std::invalid_argument("mesh_search: total free dimension > 3");

  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_x;
  Eigen::MatrixXd x(n, nn);

  std::function<void(int, int)> recurse = [&](int agent, int coord) {
    if (agent == nn) {
      if (net.dim_p() > 0 && (inequality_sum(net, x).array() > ineq_tol).any())
        return;
      if (net.dim_q() > 0 &&
          equality_residual(net, x).lpNorm<Eigen::Infinity>() > eq_tol)
        return;
      double v = 0.0;
      for (int i = 0; i < nn; ++i) v += eval_cost(net.agents[i], x.col(i));
      if (v < best) {
        best = v;
        best_x = x;
      }
      return;
    }
    const auto& set = net.agents[agent].set;
    const int d = set.dim;
    if (set.kind == SetKind::UnitSimplex) {
      if (coord == d - 1) {
        double rest = 1.0 - x.col(agent).head(d - 1).sum();
        if (rest < -1e-12) return;
        x(d - 1, agent) = std::max(rest, 0.0);
        recurse(agent + 1, 0);
        return;
      }
      double remaining = 1.0 - x.col(agent).head(coord).sum();
      for (double v = 0.0; v <= remaining + 1e-12; v += resolution) {
        x(coord, agent) = std::min(v, remaining);
        recurse(agent, coord + 1);
      }
    } else {  // Box
      if (coord == d) {
        recurse(agent + 1, 0);
        return;
      }
      const double lo = set.lower[coord], hi = set.upper[coord];
      for (double v = lo; v <= hi + 1e-12; v += resolution) {
        x(coord, agent) = std::min(v, hi);
        recurse(agent, coord + 1);
      }
    }
  };
  recurse(0, 0);

  if (!std::isfinite(best))
    throw std::runtime_error("mesh_search: NO_FEASIBLE_NODE");
  return best_x;
}

}  // namespace mdbd
