#pragma once

#include <string>
#include <vector>

#include "poa/costs.hpp"
#include "poa/model.hpp"
#include "poa/regime.hpp"

namespace poa {

struct FixedRegimeOptions {
  double extension_slope = kDefaultExtensionSlope;
  // Residual tolerance, scaled by (1 + largest cost or demand magnitude).
  double tol = 1e-12;
  int max_iters = 50;
  // c'(x) at or below this counts as a zero derivative in degeneracy checks.
  double tol_deriv = 1e-9;
};

// Optimum of the fixed-regime problem with sign constraints dropped.
struct RelaxedSolution {
  Regime regime;
  Vector mu;
  Vector flows;  // per path; zero (or the prescribed perturbation) off regime
  Vector loads;  // per edge, possibly negative
  Vector m;      // per OD: common cost level of the regime's paths
  Vector eta;    // per edge: extended c_e(x_e)
  Vector nu;     // per path: sum of eta on p minus m, zero on the regime
  double residual = 0.0;
  int iterations = 0;
  // Jacobian singular in load directions at the solution: loads may be
  // sensitive to the direction of approach. `degenerate_cycle` lists the
  // zero-derivative edges that close an undirected cycle, when one exists.
  bool load_degenerate = false;
  std::vector<std::string> degenerate_cycle;
};

struct WardropConsistency {
  bool nonneg_flows = false;
  bool no_cheaper_outside = false;
  bool overall = false;
};

std::vector<ExtendedCost> extended_costs(const Game& game, double sigma);

// Newton on the KKT system in flow coordinates: sum_{e in p} c_e(x_e) = m^(h)
// for p in the regime, S f = mu. Steps are minimal-norm least-squares, so
// singular flow directions are harmless; flows are finally re-selected as the
// minimal-norm decomposition of the optimal loads. `start` (per path) seeds
// the regime flows; empty means an even split of each OD's demand.
// Throws ConvergenceError (SingularJacobianError when a zero-derivative
// cycle makes the loads indeterminate) and RegimeError.
RelaxedSolution solve_fixed_regime(const Game& game, const Regime& regime,
                                   const Vector& mu,
                                   const FixedRegimeOptions& opts = {},
                                   const Vector& start = Vector());

WardropConsistency is_wardrop_consistent(const Game& game,
                                         const RelaxedSolution& sol,
                                         double tol = 1e-9);

// min Phi(x) s.t. S f = mu, x = delta f + xi, f_p = omega_p for p outside
// the regime. `omega` is indexed by path and must vanish on the regime
// (DomainError otherwise); an empty vector means zero.
double perturbed_value(const Game& game, const Regime& regime, const Vector& mu,
                       const Vector& xi, const Vector& omega,
                       const FixedRegimeOptions& opts = {});

struct ValueGradientReport {
  double max_dev_m = 0.0;
  double max_dev_eta = 0.0;
  double max_dev_nu = 0.0;
  Vector fd_m;
  Vector fd_eta;
  Vector fd_nu;  // per path, zero on the regime
  RelaxedSolution solution;
  bool passed = false;

  double max_deviation() const;
};

// Central finite differences of perturbed_value against (m, eta, nu).
ValueGradientReport check_value_gradient(const Game& game, const Regime& regime,
                                         const Vector& mu, double h_fd = 1e-4,
                                         double tol_fd = 1e-5,
                                         const FixedRegimeOptions& opts = {});

struct AcyclicityReport {
  bool acyclic = true;
  std::vector<std::string> zero_edges;
  std::vector<std::string> cycle;  // edge ids of one offending cycle
};

// Undirected subgraph of edges with c'_e(x_e) <= tol_deriv; acyclic iff it is
// a forest.
AcyclicityReport zero_derivative_acyclicity(const Game& game, const Vector& x,
                                            double tol_deriv = 1e-9);

}  // namespace poa
