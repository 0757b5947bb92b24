#include "poa/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "poa/error.hpp"

namespace poa {
namespace {

double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

Vector eval_costs(const Game& game, const Vector& x) {
  Vector c(x.size());
  for (Eigen::Index e = 0; e < x.size(); ++e)
    c[e] = eval(game.cost(static_cast<std::size_t>(e)), x[e]);
  return c;
}

// Per-OD minimum of the path costs.
Vector od_minima(const Game& game, const Vector& path_costs) {
  Vector lam(static_cast<Eigen::Index>(game.num_ods()));
  for (std::size_t h = 0; h < game.num_ods(); ++h) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p : game.od_paths(h))
      best = std::min(best, path_costs[static_cast<Eigen::Index>(p)]);
    lam[static_cast<Eigen::Index>(h)] = best;
  }
  return lam;
}

Vector all_or_nothing(const Game& game, const Vector& mu, const Vector& path_costs) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(game.num_paths()));
  for (std::size_t h = 0; h < game.num_ods(); ++h) {
    std::size_t best = game.od_paths(h).front();
    for (std::size_t p : game.od_paths(h))
      if (path_costs[static_cast<Eigen::Index>(p)] <
          path_costs[static_cast<Eigen::Index>(best)])
        best = p;
    g[static_cast<Eigen::Index>(best)] = mu[static_cast<Eigen::Index>(h)];
  }
  return g;
}

// Directional derivative of the potential at x + alpha d along d.
double slope_along(const Game& game, const Vector& x, const Vector& d, double alpha) {
  double s = 0.0;
  for (Eigen::Index e = 0; e < x.size(); ++e) {
    if (d[e] == 0.0) continue;
    s += eval(game.cost(static_cast<std::size_t>(e)), std::max(0.0, x[e] + alpha * d[e])) * d[e];
  }
  return s;
}

struct FwOutcome {
  Vector f;
  int iterations = 0;
};

FwOutcome frank_wolfe(const Game& game, const Vector& mu, const SolverOptions& opts) {
  const Incidence& inc = game.incidence();
  FwOutcome out;
  out.f = all_or_nothing(game, mu, inc.delta.transpose() * eval_costs(game, Vector::Zero(inc.delta.rows())));
  for (; out.iterations < opts.fw_iters; ++out.iterations) {
    const Vector x = inc.delta * out.f;
    const Vector pc = inc.delta.transpose() * eval_costs(game, x);
    const double total = out.f.dot(pc);
    const double bound = mu.dot(od_minima(game, pc));
    if (total <= 0.0 || (total - bound) <= opts.fw_gap * total) break;
    const Vector g = all_or_nothing(game, mu, pc);
    const Vector d = inc.delta * (g - out.f);
    if (inf_norm(d) == 0.0) break;
    double alpha = 1.0;
    if (slope_along(game, x, d, 1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (slope_along(game, x, d, mid) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      alpha = 0.5 * (lo + hi);
    }
    out.f += alpha * (g - out.f);
  }
  return out;
}

Regime guess_regime(const Game& game, const Vector& path_costs) {
  const Vector lam = od_minima(game, path_costs);
  std::vector<std::size_t> r;
  for (std::size_t p = 0; p < game.num_paths(); ++p) {
    const double l = lam[static_cast<Eigen::Index>(game.od_of(p))];
    if (path_costs[static_cast<Eigen::Index>(p)] - l <= 1e-3 * (1.0 + std::abs(l)))
      r.push_back(p);
  }
  return Regime(std::move(r));
}

}  // namespace

EquilibriumResult solve_equilibrium(const Game& game, const Vector& mu,
                                    const SolverOptions& opts) {
  const Incidence& inc = game.incidence();
  const auto H = static_cast<Eigen::Index>(game.num_ods());
  if (mu.size() != H) throw ModelError("demand vector has wrong dimension");
  if ((mu.array() < 0.0).any()) throw DomainError("demand must be nonnegative");

  const FwOutcome fw = frank_wolfe(game, mu, opts);
  Vector f = fw.f;
  Regime regime = guess_regime(game, inc.delta.transpose() * eval_costs(game, inc.delta * f));

  const double tol_flow = 1e-10 * (1.0 + inf_norm(mu));
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t last_dropped = kNone;
  std::optional<RelaxedSolution> accepted;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    RelaxedSolution sol = solve_fixed_regime(game, regime, mu, opts.newton, f);

    std::optional<std::size_t> drop;
    for (std::size_t p : regime.paths()) {
      const double fp = sol.flows[static_cast<Eigen::Index>(p)];
      if (fp >= -tol_flow) continue;
      const auto& od = game.od_paths(game.od_of(p));
      const auto in_regime = std::count_if(od.begin(), od.end(),
                                           [&](std::size_t q) { return regime.contains(q); });
      if (in_regime < 2) continue;
      if (!drop || fp < sol.flows[static_cast<Eigen::Index>(*drop)]) drop = p;
    }
    if (drop) {
      regime = regime.without(*drop);
      last_dropped = *drop;
      f = sol.flows.cwiseMax(0.0);
      continue;
    }

    std::optional<std::size_t> add;
    std::optional<std::size_t> forbidden;
    for (std::size_t p = 0; p < game.num_paths(); ++p) {
      if (regime.contains(p)) continue;
      const auto pi = static_cast<Eigen::Index>(p);
      const double m = sol.m[static_cast<Eigen::Index>(game.od_of(p))];
      if (sol.nu[pi] >= -1e-10 * (1.0 + std::abs(m))) continue;
      if (last_dropped == p) {
        forbidden = p;
        continue;
      }
      if (!add || sol.nu[pi] < sol.nu[static_cast<Eigen::Index>(*add)]) add = p;
    }
    if (!add) add = forbidden;
    if (add) {
      regime = regime.with(*add);
      last_dropped = kNone;
      f = sol.flows.cwiseMax(0.0);
      continue;
    }
    accepted = std::move(sol);
    break;
  }
  if (!accepted) {
    std::ostringstream msg;
    msg << "active-set refinement did not settle within " << opts.max_iters
        << " iterations";
    throw ConvergenceError(msg.str());
  }

  EquilibriumResult res;
  res.mu = mu;
  res.support = accepted->regime;
  res.flows = accepted->flows.cwiseMax(0.0);
  res.loads = accepted->loads.cwiseMax(0.0);
  res.edge_costs = eval_costs(game, res.loads);
  res.path_costs = inc.delta.transpose() * res.edge_costs;
  res.od_costs = od_minima(game, res.path_costs);
  res.potential = game.potential(res.loads);
  res.wardrop_gap = wardrop_gap(game, FlowLoad{res.flows, res.loads}, mu);
  res.social_cost = mu.dot(res.od_costs);
  res.regime = active_regime(game, res, opts.eps_active);
  res.fw_iterations = fw.iterations;
  res.active_set_iterations = iter + 1;
  res.loads_possibly_nonunique = accepted->load_degenerate;
  for (std::size_t e = 0; e < game.num_edges(); ++e)
    if (!is_strictly_increasing(game.cost(e))) res.loads_possibly_nonunique = true;

  const double scale = 1.0 + inf_norm(res.od_costs);
  if (res.wardrop_gap > opts.tol_gap * scale) {
    std::ostringstream msg;
    msg << "equilibrium Wardrop gap " << res.wardrop_gap << " exceeds tolerance";
    throw ConvergenceError(msg.str());
  }
  return res;
}

double wardrop_gap(const Game& game, const FlowLoad& fl, const Vector& mu) {
  const Incidence& inc = game.incidence();
  if (fl.f.size() != static_cast<Eigen::Index>(game.num_paths()) ||
      fl.x.size() != static_cast<Eigen::Index>(game.num_edges()))
    throw ModelError("flow/load vector has wrong dimension");
  const double tol = 1e-8 * (1.0 + inf_norm(mu));
  if (!check_feasible(inc, fl.f, mu, tol)) throw DomainError("flow is infeasible");
  const Vector pc = inc.delta.transpose() * eval_costs(game, fl.x.cwiseMax(0.0));
  const Vector lam = od_minima(game, pc);
  double gap = 0.0;
  for (std::size_t p = 0; p < game.num_paths(); ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    if (fl.f[pi] <= 0.0) continue;
    gap = std::max(gap, pc[pi] - lam[static_cast<Eigen::Index>(game.od_of(p))]);
  }
  return gap;
}

Regime active_regime(const Game& game, const EquilibriumResult& res,
                     double eps_active) {
  std::vector<std::size_t> r;
  for (std::size_t p = 0; p < game.num_paths(); ++p) {
    const double l = res.od_costs[static_cast<Eigen::Index>(game.od_of(p))];
    if (res.path_costs[static_cast<Eigen::Index>(p)] - l <= eps_active * (1.0 + std::abs(l)))
      r.push_back(p);
  }
  return Regime(std::move(r));
}

double social_cost(const Game& game, const FlowLoad& fl) {
  const Incidence& inc = game.incidence();
  if (fl.f.size() != static_cast<Eigen::Index>(game.num_paths()) ||
      fl.x.size() != static_cast<Eigen::Index>(game.num_edges()))
    throw ModelError("flow/load vector has wrong dimension");
  if (inf_norm(inc.delta * fl.f - fl.x) > 1e-9 * (1.0 + inf_norm(fl.x)))
    throw ModelError("loads do not match the flow");
  const Vector c = eval_costs(game, fl.x);
  const double by_edge = fl.x.dot(c);
  const double by_path = fl.f.dot(inc.delta.transpose() * c);
  if (std::abs(by_edge - by_path) > 1e-8 * (1.0 + std::abs(by_edge)))
    throw ModelError("edge and path forms of the social cost disagree");
  return by_edge;
}

SocialOptimum solve_social_optimum(const Game& game, const Vector& mu,
                                   const SolverOptions& opts) {
  std::vector<CostFunction> marg;
  marg.reserve(game.num_edges());
  for (std::size_t e = 0; e < game.num_edges(); ++e) {
    if (!has_convex_total_cost(game.cost(e)))
      throw NonConvexError("x c(x) is not convex on edge '" +
                           game.network().edge(e).id + "'");
    marg.push_back(marginal(game.cost(e)));
  }
  SocialOptimum out;
  out.marginal = solve_equilibrium(game.with_costs(marg), mu, opts);
  out.social_cost = out.marginal.loads.dot(eval_costs(game, out.marginal.loads));
  return out;
}

PoaResult price_of_anarchy(const Game& game, const Vector& mu,
                           const SolverOptions& opts) {
  PoaResult out;
  out.equilibrium = solve_equilibrium(game, mu, opts);
  out.optimum = solve_social_optimum(game, mu, opts);
  out.sc_eq = out.equilibrium.social_cost;
  out.sc_opt = out.optimum.social_cost;
  if (inf_norm(mu) == 0.0 || out.sc_opt <= 0.0)
    out.poa = 1.0;
  else
    out.poa = out.sc_eq / out.sc_opt;
  return out;
}

double dual_certificate_affine(const Game& game, const Vector& mu,
                               const EquilibriumResult& res) {
  double conj = 0.0;
  for (std::size_t e = 0; e < game.num_edges(); ++e) {
    const auto* aff = std::get_if<Affine>(&game.cost(e));
    if (aff == nullptr)
      throw ModelError("dual certificate needs affine costs; edge '" +
                       game.network().edge(e).id + "' is not affine");
    conj += fenchel_conjugate_affine(*aff, res.edge_costs[static_cast<Eigen::Index>(e)]);
  }
  const Vector pc = game.incidence().delta.transpose() * res.edge_costs;
  return game.potential(res.loads) + conj - mu.dot(od_minima(game, pc));
}

Vector grad_social_optimum(const Game& game, const Vector& mu,
                           const SolverOptions& opts) {
  return solve_social_optimum(game, mu, opts).marginal.od_costs;
}

}  // namespace poa
