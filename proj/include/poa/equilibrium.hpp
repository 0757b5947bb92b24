#pragma once

#include <vector>

#include "poa/fixed_regime.hpp"
#include "poa/model.hpp"
#include "poa/regime.hpp"

namespace poa {

struct SolverOptions {
  // Absolute Wardrop gap accepted, scaled by (1 + largest OD cost).
  double tol_gap = 1e-9;
  // Relative slack for a path to count as minimum-cost.
  double eps_active = 1e-7;
  int max_iters = 100;   // active-set iterations
  int fw_iters = 10000;  // Frank-Wolfe iterations
  double fw_gap = 1e-4;  // relative gap that ends the Frank-Wolfe phase
  FixedRegimeOptions newton;
};

struct EquilibriumResult {
  Vector mu;
  Vector flows;       // per path, minimal-norm decomposition of the loads
  Vector loads;       // per edge
  Vector edge_costs;  // tau
  Vector path_costs;
  Vector od_costs;    // lambda
  double potential = 0.0;
  double wardrop_gap = 0.0;
  double social_cost = 0.0;  // sum_h mu_h lambda_h
  Regime regime;             // active regime at eps_active
  Regime support;            // regime of the final fixed-regime solve
  int fw_iterations = 0;
  int active_set_iterations = 0;
  // Some cost is not strictly increasing, so other load profiles may also be
  // equilibria (edge and OD costs stay unique).
  bool loads_possibly_nonunique = false;
};

// Frank-Wolfe warm start, then active-set refinement with the fixed-regime
// Newton solver. Throws ConvergenceError.
EquilibriumResult solve_equilibrium(const Game& game, const Vector& mu,
                                    const SolverOptions& opts = {});

// Largest excess cost of a used path over its OD's cheapest path. Throws
// DomainError when the flow is infeasible.
double wardrop_gap(const Game& game, const FlowLoad& fl, const Vector& mu);

Regime active_regime(const Game& game, const EquilibriumResult& res,
                     double eps_active);

// sum_e x_e c_e(x_e), cross-checked against sum_p f_p c_p(x). Throws
// ModelError when x and f disagree.
double social_cost(const Game& game, const FlowLoad& fl);

struct SocialOptimum {
  EquilibriumResult marginal;  // equilibrium of the marginal-cost game
  double social_cost = 0.0;    // evaluated with the original costs
};

// Throws NonConvexError unless x c(x) is convex on every edge.
SocialOptimum solve_social_optimum(const Game& game, const Vector& mu,
                                   const SolverOptions& opts = {});

struct PoaResult {
  EquilibriumResult equilibrium;
  SocialOptimum optimum;
  double sc_eq = 0.0;
  double sc_opt = 0.0;
  double poa = 1.0;  // 1 at zero demand
};

PoaResult price_of_anarchy(const Game& game, const Vector& mu,
                           const SolverOptions& opts = {});

// Primal-dual gap of the Beckmann program and its conjugate dual at
// (x*, tau). Needs affine costs with a >= 0; an a = 0 edge contributes the
// indicator conjugate. Throws ModelError otherwise.
double dual_certificate_affine(const Game& game, const Vector& mu,
                               const EquilibriumResult& res);

// Gradient of mu -> SC_opt(mu): the marginal game's OD costs.
Vector grad_social_optimum(const Game& game, const Vector& mu,
                           const SolverOptions& opts = {});

}  // namespace poa
