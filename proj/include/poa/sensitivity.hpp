#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poa/equilibrium.hpp"
#include "poa/model.hpp"
#include "poa/regime.hpp"

namespace poa {

// f0 + pinv([delta; S]) [x - x0; mu - mu0]. Throws AttainabilityError when
// the result misses the targets by more than tol (scaled by 1 + target size).
Vector flow_selection_pseudoinverse(const Incidence& inc, const Vector& f0,
                                    const Vector& x0, const Vector& mu0,
                                    const Vector& x, const Vector& mu,
                                    double tol = 1e-9);

struct QpResult {
  Vector y;             // per path, zero off regime; minimal-norm minimizer
  Vector z;             // per edge, delta y
  Vector m;             // per OD multipliers: the OD cost derivatives
  double theta = 0.0;   // sum_e c'_e z_e^2
  double theta_dual = 0.0;  // rates . m, equal to theta at the optimum
  double constraint_residual = 0.0;
};

// min 1/2 sum_e c'_e(x_bar_e) z_e^2 over y supported on the regime with
// S y = rates. Throws RegimeError when the regime misses an OD.
QpResult theta_qp(const Game& game, const Vector& x_bar, const Regime& regime,
                  const Vector& rates);

enum class Side { Left, Right };

const char* to_string(Side side);

struct SensitivityResult {
  Side side = Side::Right;
  double t = 0.0;
  double eps_probe = 0.0;
  Regime regime;
  Vector rates;  // one-sided mu'(t)
  QpResult qp;
  Vector lambda;
  Vector lambda_prime;
  double sc_eq = 0.0;
  double sc_prime = 0.0;
  // Absent when the social optimum cannot be computed (x c(x) not convex)
  // or vanishes.
  std::optional<double> sc_opt;
  std::optional<double> sc_opt_prime;
  std::optional<double> poa_prime;
  std::vector<std::string> annotations;
};

// eps_probe <= 0 selects 1e-4 (1 + |t_bar|). Throws RegimeError when the
// probes at eps and 2 eps see different regimes, DomainError when a probe
// leaves the curve's domain.
SensitivityResult one_sided_derivatives(const Game& game, const DemandCurve& curve,
                                        double t_bar, Side side,
                                        double eps_probe = 0.0,
                                        const SolverOptions& opts = {});

double default_probe(double t_bar);

struct BreakpointScanOptions {
  std::size_t grid_n = 161;
  double tol_t = 1e-7;
};

// Sampled regime changes on [t0, t1], refined by bisection. Points where the
// regime is the same on both sides are dropped.
std::vector<double> locate_breakpoints(const Game& game, const DemandCurve& curve,
                                       double t0, double t1,
                                       const BreakpointScanOptions& scan = {},
                                       const SolverOptions& opts = {});

enum class Relation { Expansion, Contraction, Equal, Incomparable };
enum class Verdict { ConsistentWeak, ConsistentStrict, Violated, NotApplicable };

const char* to_string(Relation r);
const char* to_string(Verdict v);

Relation compare_regimes(const Regime& left, const Regime& right);

struct BreakpointReport {
  double t = 0.0;
  double eps_probe = 0.0;
  Regime regime_left;
  Regime regime_right;
  Relation relation = Relation::Equal;
  SensitivityResult left;
  SensitivityResult right;
  Verdict verdict = Verdict::NotApplicable;
  // Set for BPR instances, where no smoothness guarantee backs the numbers.
  bool heuristic = false;
  std::vector<std::string> annotations;
};

BreakpointReport classify_breakpoint(const Game& game, const DemandCurve& curve,
                                     double t_bar, double eps_probe = 0.0,
                                     const SolverOptions& opts = {});

struct AffineFlows {
  Vector w;  // per path slope
  Vector z;  // per path intercept
  double residual = 0.0;  // worst mismatch at the interval midpoint
};

// Flows f(t) = w t + z of the fixed-regime solution on [t_a, t_b]. Needs
// affine costs (ModelError) and a non-piecewise curve (ModelError); throws
// RegimeError when the midpoint solve is not affine in t.
AffineFlows affine_parametric_equilibrium(const Game& game, const DemandCurve& curve,
                                          const Regime& regime, double t_a,
                                          double t_b,
                                          const FixedRegimeOptions& opts = {});

}  // namespace poa
