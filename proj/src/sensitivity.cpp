#include "poa/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "poa/error.hpp"
#include "poa/linalg.hpp"
#include "poa/parallel.hpp"

namespace poa {
namespace {

double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

bool all_affine(const Game& game) {
  for (std::size_t e = 0; e < game.num_edges(); ++e)
    if (!is_affine(game.cost(e))) return false;
  return true;
}

bool has_bpr(const Game& game) {
  for (std::size_t e = 0; e < game.num_edges(); ++e)
    if (std::holds_alternative<Bpr>(game.cost(e))) return true;
  return false;
}

Regime regime_at(const Game& game, const DemandCurve& curve, double t,
                 const SolverOptions& opts) {
  return solve_equilibrium(game, curve.mu(t), opts).regime;
}

// First regime change in (lo, hi], assuming the regimes at the ends differ.
// Returns the final bracket.
std::pair<double, double> bisect_change(const Game& game, const DemandCurve& curve,
                                        double lo, double hi, const Regime& r_lo,
                                        double tol_t, const SolverOptions& opts) {
  while (hi - lo > tol_t) {
    const double mid = 0.5 * (lo + hi);
    if (regime_at(game, curve, mid, opts) == r_lo)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

}  // namespace

Vector flow_selection_pseudoinverse(const Incidence& inc, const Vector& f0,
                                    const Vector& x0, const Vector& mu0,
                                    const Vector& x, const Vector& mu, double tol) {
  const Eigen::Index E = inc.delta.rows();
  const Eigen::Index P = inc.delta.cols();
  const Eigen::Index H = inc.s.rows();
  if (f0.size() != P || x0.size() != E || x.size() != E || mu0.size() != H ||
      mu.size() != H)
    throw ModelError("flow selection arguments have wrong dimensions");
  Matrix a(E + H, P);
  a << inc.delta, inc.s;
  Vector b(E + H);
  b << x - x0, mu - mu0;
  const Vector f = f0 + linalg::min_norm_solve(a, b);
  const double residual =
      std::max(inf_norm(inc.delta * f - x), inf_norm(inc.s * f - mu));
  if (residual > tol * (1.0 + std::max(inf_norm(x), inf_norm(mu)))) {
    std::ostringstream msg;
    msg << "target loads and demands are not attainable (residual " << residual << ")";
    throw AttainabilityError(msg.str(), residual);
  }
  return f;
}

QpResult theta_qp(const Game& game, const Vector& x_bar, const Regime& regime,
                  const Vector& rates) {
  const Incidence& inc = game.incidence();
  const auto E = static_cast<Eigen::Index>(game.num_edges());
  const auto H = static_cast<Eigen::Index>(game.num_ods());
  if (x_bar.size() != E || rates.size() != H)
    throw ModelError("theta QP arguments have wrong dimensions");
  require_covers_all_ods(game, regime);

  Vector d(E);
  for (Eigen::Index e = 0; e < E; ++e)
    d[e] = eval_derivative(game.cost(static_cast<std::size_t>(e)), std::max(0.0, x_bar[e]));
  const std::vector<std::size_t>& rp = regime.paths();
  const Matrix delta_r = linalg::select_columns(inc.delta, rp);
  const Matrix s_r = linalg::select_columns(inc.s, rp);
  const auto k = static_cast<Eigen::Index>(rp.size());

  Matrix kkt = Matrix::Zero(k + H, k + H);
  kkt.topLeftCorner(k, k) = delta_r.transpose() * d.asDiagonal() * delta_r;
  kkt.topRightCorner(k, H) = -s_r.transpose();
  kkt.bottomLeftCorner(H, k) = s_r;
  Vector rhs = Vector::Zero(k + H);
  rhs.tail(H) = rates;
  const Vector sol = linalg::min_norm_solve(kkt, rhs);

  QpResult out;
  out.y = Vector::Zero(static_cast<Eigen::Index>(game.num_paths()));
  for (Eigen::Index i = 0; i < k; ++i) out.y[static_cast<Eigen::Index>(rp[i])] = sol[i];
  out.m = sol.tail(H);
  out.z = inc.delta * out.y;
  out.theta = (d.array() * out.z.array().square()).sum();
  out.theta_dual = rates.dot(out.m);
  out.constraint_residual = inf_norm(inc.s * out.y - rates);
  return out;
}

const char* to_string(Side side) { return side == Side::Left ? "left" : "right"; }

double default_probe(double t_bar) { return 1e-4 * (1.0 + std::abs(t_bar)); }

SensitivityResult one_sided_derivatives(const Game& game, const DemandCurve& curve,
                                        double t_bar, Side side, double eps_probe,
                                        const SolverOptions& opts) {
  SensitivityResult out;
  out.side = side;
  out.t = t_bar;
  out.eps_probe = eps_probe > 0.0 ? eps_probe : default_probe(t_bar);
  const double sign = side == Side::Left ? -1.0 : 1.0;
  const double t1 = t_bar + sign * out.eps_probe;
  const double t2 = t_bar + sign * 2.0 * out.eps_probe;
  if (!curve.contains(t1) || !curve.contains(t2)) {
    std::ostringstream msg;
    msg << to_string(side) << " probe at t = " << t2 << " leaves the demand domain";
    throw DomainError(msg.str());
  }
  const Regime r1 = regime_at(game, curve, t1, opts);
  const Regime r2 = regime_at(game, curve, t2, opts);
  if (!(r1 == r2)) {
    std::ostringstream msg;
    msg << "regime not locally constant on the " << to_string(side) << " of t = " << t_bar;
    throw RegimeError(msg.str());
  }
  out.regime = r1;

  const DemandPoint dp = eval_demand(curve, t_bar);
  out.rates = side == Side::Left ? dp.left_derivative : dp.right_derivative;
  const EquilibriumResult eq = solve_equilibrium(game, dp.mu, opts);
  out.qp = theta_qp(game, eq.loads, out.regime, out.rates);
  out.lambda = eq.od_costs;
  out.lambda_prime = out.qp.m;
  out.sc_eq = eq.social_cost;
  out.sc_prime = out.rates.dot(eq.od_costs) + dp.mu.dot(out.qp.m);

  if (!curve.is_linear()) out.annotations.emplace_back("extension: non-proportional demand");
  try {
    const SocialOptimum opt = solve_social_optimum(game, dp.mu, opts);
    out.sc_opt = opt.social_cost;
    out.sc_opt_prime = out.rates.dot(opt.marginal.od_costs);
    if (*out.sc_opt > 0.0) {
      out.poa_prime = (out.sc_prime * *out.sc_opt - out.sc_eq * *out.sc_opt_prime) /
                      (*out.sc_opt * *out.sc_opt);
    } else {
      out.annotations.emplace_back("zero optimum social cost: PoA derivative undefined");
    }
  } catch (const NonConvexError& e) {
    out.annotations.emplace_back(std::string("social optimum unavailable: ") + e.what());
  }
  return out;
}

std::vector<double> locate_breakpoints(const Game& game, const DemandCurve& curve,
                                       double t0, double t1,
                                       const BreakpointScanOptions& scan,
                                       const SolverOptions& base) {
  // A path joins the active regime once its cost gap drops below eps_active,
  // so the located point is off by about eps_active / (rate of the gap).
  SolverOptions opts = base;
  opts.eps_active = std::min(base.eps_active, 1e-10);
  if (scan.grid_n < 2) throw DomainError("breakpoint grid needs at least 2 points");
  if (!(t0 < t1)) throw DomainError("breakpoint range must satisfy t0 < t1");
  if (!curve.contains(t0) || !curve.contains(t1))
    throw DomainError("breakpoint range leaves the demand domain");

  const std::size_t n = scan.grid_n;
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i)
    ts[i] = i + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  std::vector<Regime> regimes(n);
  parallel_for(n, [&](std::size_t i) { regimes[i] = regime_at(game, curve, ts[i], opts); });

  std::vector<std::size_t> changed;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(regimes[i] == regimes[i + 1])) changed.push_back(i);

  std::vector<std::vector<double>> found(changed.size());
  parallel_for(changed.size(), [&](std::size_t j) {
    const std::size_t i = changed[j];
    double lo = ts[i];
    Regime r_lo = regimes[i];
    // An interval may hold several changes; peel them off left to right.
    while (!(r_lo == regimes[i + 1])) {
      const auto [a, b] = bisect_change(game, curve, lo, ts[i + 1], r_lo, scan.tol_t, opts);
      found[j].push_back(0.5 * (a + b));
      if (b >= ts[i + 1]) break;
      lo = b;
      r_lo = regime_at(game, curve, b, opts);
    }
  });

  std::vector<double> candidates;
  for (const auto& v : found) candidates.insert(candidates.end(), v.begin(), v.end());
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> merged;
  for (double t : candidates)
    if (merged.empty() || t - merged.back() > 10.0 * scan.tol_t) merged.push_back(t);

  std::vector<char> keep(merged.size(), 0);
  parallel_for(merged.size(), [&](std::size_t j) {
    const double t = merged[j];
    const double eps = default_probe(t);
    const double a = std::max(curve.t_min(), t - eps);
    const double b = std::min(curve.t_max(), t + eps);
    keep[j] = !(regime_at(game, curve, a, opts) == regime_at(game, curve, b, opts));
  });
  // Changes closer together than the probe offset cannot be told apart.
  std::vector<double> out;
  std::size_t cluster = 0;
  for (std::size_t j = 0; j < merged.size(); ++j) {
    if (!keep[j]) continue;
    if (!out.empty() && merged[j] - out.back() <= default_probe(merged[j])) {
      ++cluster;
      out.back() += (merged[j] - out.back()) / static_cast<double>(cluster + 1);
      continue;
    }
    cluster = 0;
    out.push_back(merged[j]);
  }
  return out;
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Expansion: return "expansion";
    case Relation::Contraction: return "contraction";
    case Relation::Equal: return "equal";
    case Relation::Incomparable: return "incomparable";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ConsistentWeak: return "consistent-weak";
    case Verdict::ConsistentStrict: return "consistent-strict";
    case Verdict::Violated: return "violated";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

Relation compare_regimes(const Regime& left, const Regime& right) {
  if (left == right) return Relation::Equal;
  if (left.subset_of(right)) return Relation::Expansion;
  if (right.subset_of(left)) return Relation::Contraction;
  return Relation::Incomparable;
}

BreakpointReport classify_breakpoint(const Game& game, const DemandCurve& curve,
                                     double t_bar, double eps_probe,
                                     const SolverOptions& opts) {
  BreakpointReport rep;
  rep.t = t_bar;
  rep.eps_probe = eps_probe > 0.0 ? eps_probe : default_probe(t_bar);
  rep.left = one_sided_derivatives(game, curve, t_bar, Side::Left, rep.eps_probe, opts);
  rep.right = one_sided_derivatives(game, curve, t_bar, Side::Right, rep.eps_probe, opts);
  rep.regime_left = rep.left.regime;
  rep.regime_right = rep.right.regime;
  rep.relation = compare_regimes(rep.regime_left, rep.regime_right);
  rep.heuristic = has_bpr(game);
  if (rep.heuristic) rep.annotations.emplace_back("heuristic: BPR costs");

  const bool containment =
      rep.relation == Relation::Expansion || rep.relation == Relation::Contraction;
  // Under proportional demand the side with the smaller regime should carry
  // the larger derivatives.
  const SensitivityResult& small =
      rep.relation == Relation::Expansion ? rep.left : rep.right;
  const SensitivityResult& large =
      rep.relation == Relation::Expansion ? rep.right : rep.left;

  std::vector<double> margins;
  std::vector<double> scales;
  if (containment) {
    margins.push_back(small.sc_prime - large.sc_prime);
    scales.push_back(std::max(std::abs(small.sc_prime), std::abs(large.sc_prime)));
    if (small.poa_prime && large.poa_prime) {
      margins.push_back(*small.poa_prime - *large.poa_prime);
      scales.push_back(std::max(std::abs(*small.poa_prime), std::abs(*large.poa_prime)));
    } else {
      rep.annotations.emplace_back("PoA derivatives unavailable; SC derivatives only");
    }
  }
  bool weak_ok = true;
  bool strict_ok = true;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (margins[i] < -1e-6 * (1.0 + scales[i])) weak_ok = false;
    if (!(margins[i] > 1e-8)) strict_ok = false;
  }

  if (!curve.is_linear()) {
    rep.verdict = Verdict::NotApplicable;
    if (containment && !weak_ok)
      rep.annotations.emplace_back("conjecture-direction violated; demand not proportional");
    else
      rep.annotations.emplace_back("demand not proportional");
    return rep;
  }
  if (!containment) {
    rep.verdict = Verdict::NotApplicable;
    rep.annotations.emplace_back(rep.relation == Relation::Equal
                                     ? "regimes equal on both sides"
                                     : "regimes incomparable");
    return rep;
  }
  if (!weak_ok) {
    rep.verdict = Verdict::Violated;
    rep.annotations.emplace_back("weak inequality fails");
  } else if (strict_ok) {
    rep.verdict = Verdict::ConsistentStrict;
  } else if (all_affine(game)) {
    rep.verdict = Verdict::Violated;
    rep.annotations.emplace_back("strict inequality fails for affine costs");
  } else {
    rep.verdict = Verdict::ConsistentWeak;
  }
  return rep;
}

AffineFlows affine_parametric_equilibrium(const Game& game, const DemandCurve& curve,
                                          const Regime& regime, double t_a,
                                          double t_b, const FixedRegimeOptions& opts) {
  if (!all_affine(game)) throw ModelError("affine parametric form needs affine costs");
  if (std::holds_alternative<PiecewiseAffineDemand>(curve.kind()))
    throw ModelError("affine parametric form needs a linear or affine demand curve");
  if (!(t_a < t_b)) throw DomainError("affine parametric form needs t_a < t_b");
  const Vector fa = solve_fixed_regime(game, regime, curve.mu(t_a), opts).flows;
  const Vector fb = solve_fixed_regime(game, regime, curve.mu(t_b), opts).flows;
  AffineFlows out;
  out.w = (fb - fa) / (t_b - t_a);
  out.z = fa - out.w * t_a;
  const double t_mid = 0.5 * (t_a + t_b);
  const Vector fm = solve_fixed_regime(game, regime, curve.mu(t_mid), opts).flows;
  out.residual = inf_norm(fm - (out.w * t_mid + out.z));
  if (out.residual > 1e-8 * (1.0 + inf_norm(fm))) {
    std::ostringstream msg;
    msg << "fixed-regime flows are not affine on [" << t_a << ", " << t_b
        << "] (midpoint residual " << out.residual << ")";
    throw RegimeError(msg.str());
  }
  return out;
}

}  // namespace poa
