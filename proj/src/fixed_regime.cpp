#include "poa/fixed_regime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "poa/error.hpp"
#include "poa/linalg.hpp"

namespace poa {
namespace {

double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct KktSystem {
  const Game& game;
  const std::vector<ExtendedCost>& costs;
  const std::vector<std::size_t>& regime;
  Matrix delta_r;
  Matrix s_r;
  Vector offset_x;
  Vector demand;  // mu minus the prescribed off-regime flows

  std::size_t k() const { return regime.size(); }
  std::size_t h() const { return game.num_ods(); }

  Vector loads(const Vector& z) const {
    return delta_r * z.head(static_cast<Eigen::Index>(k())) + offset_x;
  }

  Vector edge_values(const Vector& x) const {
    Vector c(x.size());
    for (Eigen::Index e = 0; e < x.size(); ++e)
      c[e] = eval(costs[static_cast<std::size_t>(e)], x[e]);
    return c;
  }

  Vector residual(const Vector& z) const {
    const auto nk = static_cast<Eigen::Index>(k());
    const auto nh = static_cast<Eigen::Index>(h());
    const Vector pc = delta_r.transpose() * edge_values(loads(z));
    Vector r(nk + nh);
    for (Eigen::Index i = 0; i < nk; ++i)
      r[i] = pc[i] - z[nk + static_cast<Eigen::Index>(
                              game.od_of(regime[static_cast<std::size_t>(i)]))];
    r.tail(nh) = s_r * z.head(nk) - demand;
    return r;
  }

  Matrix jacobian(const Vector& z) const {
    const auto nk = static_cast<Eigen::Index>(k());
    const auto nh = static_cast<Eigen::Index>(h());
    const Vector x = loads(z);
    Vector d(x.size());
    for (Eigen::Index e = 0; e < x.size(); ++e)
      d[e] = eval_derivative(costs[static_cast<std::size_t>(e)], x[e]);
    Matrix j = Matrix::Zero(nk + nh, nk + nh);
    j.topLeftCorner(nk, nk) = delta_r.transpose() * d.asDiagonal() * delta_r;
    j.topRightCorner(nk, nh) = -s_r.transpose();
    j.bottomLeftCorner(nh, nk) = s_r;
    return j;
  }

  // Whether some direction in the Jacobian's kernel moves the loads.
  bool load_degenerate(const Vector& z) const {
    const Matrix kernel = linalg::null_space(jacobian(z), 1e-10);
    const auto nk = static_cast<Eigen::Index>(k());
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      const Vector y = kernel.col(c).head(nk);
      if ((delta_r * y).norm() > 1e-8 * std::max(1.0, y.norm())) return true;
    }
    return false;
  }
};

RelaxedSolution solve_relaxed(const Game& game, const Regime& regime,
                              const Vector& mu, const Vector& xi,
                              const Vector& omega, const FixedRegimeOptions& opts,
                              const Vector& start) {
  const Incidence& inc = game.incidence();
  const auto E = static_cast<Eigen::Index>(game.num_edges());
  const auto P = static_cast<Eigen::Index>(game.num_paths());
  const auto H = static_cast<Eigen::Index>(game.num_ods());
  if (mu.size() != H) throw ModelError("demand vector has wrong dimension");
  if (xi.size() != 0 && xi.size() != E)
    throw ModelError("load perturbation has wrong dimension");
  if (omega.size() != 0 && omega.size() != P)
    throw ModelError("flow perturbation has wrong dimension");
  require_covers_all_ods(game, regime);

  Vector fixed_flows = Vector::Zero(P);
  if (omega.size() == P) {
    for (Eigen::Index p = 0; p < P; ++p) {
      if (omega[p] == 0.0) continue;
      if (regime.contains(static_cast<std::size_t>(p)))
        throw DomainError("flow perturbation on regime path '" +
                          game.path_id(static_cast<std::size_t>(p)) + "'");
      fixed_flows[p] = omega[p];
    }
  }

  const std::vector<ExtendedCost> costs = extended_costs(game, opts.extension_slope);
  const std::vector<std::size_t>& rp = regime.paths();
  KktSystem sys{game,
                costs,
                rp,
                linalg::select_columns(inc.delta, rp),
                linalg::select_columns(inc.s, rp),
                inc.delta * fixed_flows,
                mu - inc.s * fixed_flows};
  if (xi.size() == E) sys.offset_x += xi;

  const auto nk = static_cast<Eigen::Index>(rp.size());
  Vector z = Vector::Zero(nk + H);
  if (start.size() == P) {
    for (Eigen::Index i = 0; i < nk; ++i) z[i] = start[static_cast<Eigen::Index>(rp[i])];
  } else {
    for (Eigen::Index i = 0; i < nk; ++i) {
      const auto h = static_cast<Eigen::Index>(game.od_of(rp[i]));
      z[i] = sys.demand[h] / sys.s_r.row(h).sum();
    }
  }
  {
    const Vector pc = sys.delta_r.transpose() * sys.edge_values(sys.loads(z));
    for (Eigen::Index h = 0; h < H; ++h) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < nk; ++i)
        if (sys.s_r(h, i) != 0.0) sum += pc[i];
      z[nk + h] = sum / sys.s_r.row(h).sum();
    }
  }

  const auto tolerance = [&](const Vector& zz) {
    const Vector c = sys.edge_values(sys.loads(zz));
    return opts.tol * (1.0 + std::max(inf_norm(c), inf_norm(mu)));
  };

  Vector r = sys.residual(z);
  double norm = inf_norm(r);
  int iters = 0;
  bool converged = norm <= tolerance(z);
  for (; iters < opts.max_iters && norm > 0.0; ++iters) {
    const Vector d = linalg::min_norm_solve(sys.jacobian(z), -r);
    double alpha = 1.0;
    Vector trial;
    Vector trial_r;
    double trial_norm = norm;
    bool improved = false;
    for (int halvings = 0; halvings < 40; ++halvings, alpha *= 0.5) {
      trial = z + alpha * d;
      trial_r = sys.residual(trial);
      trial_norm = inf_norm(trial_r);
      if (trial_norm < norm) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    const double step = alpha * inf_norm(d);
    z = trial;
    r = trial_r;
    norm = trial_norm;
    converged = norm <= tolerance(z);
    // Keep polishing while steps are still moving the iterate: degenerate
    // solutions (zero c' at the optimum) converge only linearly in x even
    // after the residual is tiny.
    if (converged && step <= 1e-13 * (1.0 + inf_norm(z))) {
      ++iters;
      break;
    }
  }
  converged = norm <= tolerance(z);

  if (!converged) {
    std::ostringstream msg;
    msg << "fixed-regime Newton did not converge (residual " << norm << " after "
        << iters << " iterations)";
    if (sys.load_degenerate(z)) {
      AcyclicityReport rep =
          zero_derivative_acyclicity(game, sys.loads(z), opts.tol_deriv);
      if (!rep.acyclic) {
        msg << "; Jacobian singular in load directions along a cycle of "
               "zero-derivative edges";
        throw SingularJacobianError(msg.str(), rep.cycle);
      }
    }
    throw ConvergenceError(msg.str());
  }

  RelaxedSolution sol;
  sol.regime = regime;
  sol.mu = mu;
  sol.loads = sys.loads(z);
  sol.m = z.tail(H);
  sol.eta = sys.edge_values(sol.loads);
  sol.residual = norm;
  sol.iterations = iters;

  // Minimal-norm flow decomposition of the optimal loads.
  Vector f_r = z.head(nk);
  {
    Matrix a(E + H, nk);
    a << sys.delta_r, sys.s_r;
    Vector b(E + H);
    b << sol.loads - sys.offset_x, sys.demand;
    const Vector candidate = linalg::min_norm_solve(a, b);
    const double scale = 1.0 + std::max(inf_norm(b), inf_norm(f_r));
    if (inf_norm(a * candidate - b) <= 1e-10 * scale) f_r = candidate;
  }
  sol.flows = fixed_flows;
  for (Eigen::Index i = 0; i < nk; ++i) sol.flows[static_cast<Eigen::Index>(rp[i])] = f_r[i];

  const Vector path_eta = inc.delta.transpose() * sol.eta;
  sol.nu = Vector::Zero(P);
  for (Eigen::Index p = 0; p < P; ++p)
    if (!regime.contains(static_cast<std::size_t>(p)))
      sol.nu[p] = path_eta[p] - sol.m[static_cast<Eigen::Index>(game.od_of(static_cast<std::size_t>(p)))];

  if (sys.load_degenerate(z)) {
    sol.load_degenerate = true;
    sol.degenerate_cycle =
        zero_derivative_acyclicity(game, sol.loads, opts.tol_deriv).cycle;
  }
  return sol;
}

double extended_potential(const std::vector<ExtendedCost>& costs, const Vector& x) {
  double v = 0.0;
  for (Eigen::Index e = 0; e < x.size(); ++e)
    v += primitive(costs[static_cast<std::size_t>(e)], x[e]);
  return v;
}

}  // namespace

std::vector<ExtendedCost> extended_costs(const Game& game, double sigma) {
  std::vector<ExtendedCost> out;
  out.reserve(game.num_edges());
  for (std::size_t e = 0; e < game.num_edges(); ++e)
    out.push_back(extend_negative(game.cost(e), sigma));
  return out;
}

RelaxedSolution solve_fixed_regime(const Game& game, const Regime& regime,
                                   const Vector& mu,
                                   const FixedRegimeOptions& opts,
                                   const Vector& start) {
  return solve_relaxed(game, regime, mu, Vector(), Vector(), opts, start);
}

WardropConsistency is_wardrop_consistent(const Game& game,
                                         const RelaxedSolution& sol, double tol) {
  WardropConsistency out;
  out.nonneg_flows = true;
  out.no_cheaper_outside = true;
  for (std::size_t p = 0; p < game.num_paths(); ++p) {
    const auto h = static_cast<Eigen::Index>(game.od_of(p));
    const auto pi = static_cast<Eigen::Index>(p);
    if (sol.regime.contains(p)) {
      if (sol.flows[pi] < -tol * (1.0 + std::abs(sol.mu[h]))) out.nonneg_flows = false;
    } else if (sol.nu[pi] < -tol * (1.0 + std::abs(sol.m[h]))) {
      out.no_cheaper_outside = false;
    }
  }
  out.overall = out.nonneg_flows && out.no_cheaper_outside;
  return out;
}

double perturbed_value(const Game& game, const Regime& regime, const Vector& mu,
                       const Vector& xi, const Vector& omega,
                       const FixedRegimeOptions& opts) {
  const RelaxedSolution sol = solve_relaxed(game, regime, mu, xi, omega, opts, Vector());
  return extended_potential(extended_costs(game, opts.extension_slope), sol.loads);
}

double ValueGradientReport::max_deviation() const {
  return std::max({max_dev_m, max_dev_eta, max_dev_nu});
}

ValueGradientReport check_value_gradient(const Game& game, const Regime& regime,
                                         const Vector& mu, double h_fd,
                                         double tol_fd,
                                         const FixedRegimeOptions& opts) {
  const auto E = static_cast<Eigen::Index>(game.num_edges());
  const auto P = static_cast<Eigen::Index>(game.num_paths());
  const auto H = static_cast<Eigen::Index>(game.num_ods());
  const std::vector<ExtendedCost> costs = extended_costs(game, opts.extension_slope);

  ValueGradientReport rep;
  rep.solution = solve_fixed_regime(game, regime, mu, opts);
  const Vector& warm = rep.solution.flows;

  const auto value = [&](const Vector& m, const Vector& xi, const Vector& omega) {
    Vector start = warm;
    for (Eigen::Index p = 0; p < P; ++p)
      if (!regime.contains(static_cast<std::size_t>(p))) start[p] = 0.0;
    const RelaxedSolution s = solve_relaxed(game, regime, m, xi, omega, opts, start);
    return extended_potential(costs, s.loads);
  };
  const Vector zero_xi = Vector::Zero(E);
  const Vector zero_omega = Vector::Zero(P);

  rep.fd_m = Vector::Zero(H);
  for (Eigen::Index h = 0; h < H; ++h) {
    Vector up = mu, down = mu;
    up[h] += h_fd;
    down[h] -= h_fd;
    rep.fd_m[h] = (value(up, zero_xi, zero_omega) - value(down, zero_xi, zero_omega)) /
                  (2.0 * h_fd);
    rep.max_dev_m = std::max(rep.max_dev_m, std::abs(rep.fd_m[h] - rep.solution.m[h]));
  }
  rep.fd_eta = Vector::Zero(E);
  for (Eigen::Index e = 0; e < E; ++e) {
    Vector up = zero_xi, down = zero_xi;
    up[e] = h_fd;
    down[e] = -h_fd;
    rep.fd_eta[e] = (value(mu, up, zero_omega) - value(mu, down, zero_omega)) / (2.0 * h_fd);
    rep.max_dev_eta =
        std::max(rep.max_dev_eta, std::abs(rep.fd_eta[e] - rep.solution.eta[e]));
  }
  rep.fd_nu = Vector::Zero(P);
  for (Eigen::Index p = 0; p < P; ++p) {
    if (regime.contains(static_cast<std::size_t>(p))) continue;
    Vector up = zero_omega, down = zero_omega;
    up[p] = h_fd;
    down[p] = -h_fd;
    rep.fd_nu[p] = (value(mu, zero_xi, up) - value(mu, zero_xi, down)) / (2.0 * h_fd);
    rep.max_dev_nu = std::max(rep.max_dev_nu, std::abs(rep.fd_nu[p] - rep.solution.nu[p]));
  }
  rep.passed = rep.max_deviation() <= tol_fd;
  return rep;
}

AcyclicityReport zero_derivative_acyclicity(const Game& game, const Vector& x,
                                            double tol_deriv) {
  const Network& net = game.network();
  if (static_cast<std::size_t>(x.size()) != net.num_edges())
    throw ModelError("load vector has wrong dimension");

  std::unordered_map<std::string, std::size_t> vid;
  for (std::size_t i = 0; i < net.vertices().size(); ++i) vid[net.vertices()[i]] = i;
  const std::size_t n = net.vertices().size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&parent](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  // Adjacency of the forest built so far, for recovering the cycle.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);

  AcyclicityReport rep;
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const double xe = x[static_cast<Eigen::Index>(e)];
    // Loads below zero sit on the linear extension, whose slope is positive.
    if (xe < 0.0) continue;
    if (eval_derivative(game.cost(e), xe) > tol_deriv) continue;
    const Edge& edge = net.edge(e);
    rep.zero_edges.push_back(edge.id);
    const std::size_t a = vid[edge.tail];
    const std::size_t b = vid[edge.head];
    if (find(a) != find(b)) {
      parent[find(a)] = find(b);
      adj[a].emplace_back(b, e);
      adj[b].emplace_back(a, e);
      continue;
    }
    if (!rep.acyclic) continue;
    rep.acyclic = false;
    // Tree path from a to b closes the cycle with e.
    std::vector<std::pair<std::size_t, std::size_t>> prev(
        n, {n, net.num_edges()});
    std::vector<std::size_t> queue{a};
    prev[a] = {a, net.num_edges()};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::size_t v = queue[qi];
      for (auto [w, via] : adj[v]) {
        if (prev[w].first != n) continue;
        prev[w] = {v, via};
        queue.push_back(w);
      }
    }
    rep.cycle.push_back(edge.id);
    for (std::size_t v = b; v != a; v = prev[v].first)
      rep.cycle.push_back(net.edge(prev[v].second).id);
  }
  return rep;
}

}  // namespace poa
