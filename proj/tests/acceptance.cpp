// Acceptance criteria, one PASS/FAIL line each. Exit status is nonzero when
// any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "poa/corpus.hpp"
#include "poa/error.hpp"
#include "poa/sensitivity.hpp"
#include "random_instances.hpp"

namespace {

using namespace poa;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

Instance corpus(const std::string& name, double eps = 1.0) {
  return parse_instance(example_instance(name, eps));
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double fisk_sc_eq(double t) {
  return t < 11 ? 10001 + 90 * t + t * t : (28892 + 382 * t + 2 * t * t) / 3;
}

double fisk_poa(double t) {
  if (t < 11) return 1.0;
  const double num = 28892 + 382 * t + 2 * t * t;
  if (t < 56) return num / (3 * (10001 + 90 * t + t * t));
  return num / (26867 + 382 * t + 2 * t * t);
}

void ac1(Outcome& o) {
  const Instance fisk = corpus("fisk");
  double worst_sc = 0.0, worst_poa = 0.0;
  for (double t : {2.0, 5.0, 10.0, 15.0, 30.0, 60.0}) {
    const PoaResult r = price_of_anarchy(fisk.game, fisk.demand.mu(t));
    worst_sc = std::max(worst_sc, rel_err(r.sc_eq, fisk_sc_eq(t)));
    worst_poa = std::max(worst_poa, rel_err(r.poa, fisk_poa(t)));
  }
  o.check(worst_sc <= 1e-6, "SC_eq relative error");
  o.check(worst_poa <= 1e-6, "PoA relative error");
  o.detail << "max rel err SC_eq " << num(worst_sc) << ", PoA " << num(worst_poa);
}

void ac2(Outcome& o) {
  const Instance fisk = corpus("fisk");
  const BreakpointReport r = classify_breakpoint(fisk.game, fisk.demand, 11.0);
  o.check(std::abs(r.left.sc_prime - 112.0) <= 1e-4, "SC'(11-) = 112");
  o.check(std::abs(r.right.sc_prime - 142.0) <= 1e-4, "SC'(11+) = 142");
  o.check(r.left.poa_prime && std::abs(*r.left.poa_prime) <= 1e-6, "PoA'(11-) = 0");
  o.check(r.right.poa_prime && std::abs(*r.right.poa_prime - 5.0 / 1852.0) <= 1e-6,
          "PoA'(11+) = 5/1852");
  o.check(r.relation == Relation::Expansion, "relation expansion");
  o.check(r.right.sc_prime > r.left.sc_prime, "SC' right > left");
  o.check(r.left.poa_prime && r.right.poa_prime && *r.right.poa_prime > *r.left.poa_prime,
          "PoA' right > left");
  o.detail << "SC' " << num(r.left.sc_prime) << " | " << num(r.right.sc_prime) << ", PoA' "
           << num(r.left.poa_prime.value_or(NAN)) << " | "
           << num(r.right.poa_prime.value_or(NAN)) << ", relation " << to_string(r.relation)
           << ", verdict " << to_string(r.verdict);
}

// Second-order one-sided difference quotient at t from the given side.
double one_sided_fd(const std::function<double(double)>& f, double t, double h, Side side) {
  const double s = side == Side::Left ? -1.0 : 1.0;
  return s * (-3.0 * f(t) + 4.0 * f(t + s * h) - f(t + 2 * s * h)) / (2.0 * h);
}

void ac3(Outcome& o) {
  const Instance fig = corpus("fig1");
  const std::vector<double> found = locate_breakpoints(fig.game, fig.demand, 0.0, 16.0);
  const std::vector<double> expected{1.0, 3.0, 4.0, 6.0, 13.5};
  o.check(found.size() == expected.size(), "five breakpoints");
  o.detail << "found";
  for (double t : found) o.detail << " " << num(t);
  if (found.size() != expected.size()) return;

  const auto sc = [&](double t) { return solve_equilibrium(fig.game, fig.demand.mu(t)).social_cost; };
  const auto poa = [&](double t) { return price_of_anarchy(fig.game, fig.demand.mu(t)).poa; };
  double worst_loc = 0.0, worst_sc_fd = 0.0, worst_poa_fd = 0.0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    worst_loc = std::max(worst_loc, std::abs(found[i] - expected[i]));
    const BreakpointReport r = classify_breakpoint(fig.game, fig.demand, found[i]);
    const Relation want = expected[i] == 4.0 ? Relation::Contraction : Relation::Expansion;
    o.check(r.relation == want, "relation at " + num(expected[i]));
    o.check(r.verdict == Verdict::ConsistentStrict, "strict verdict at " + num(expected[i]));
    for (const SensitivityResult* s : {&r.left, &r.right}) {
      // Anchored at the exact kink; a 1e-8 offset already shifts the quotient by ~1e-5.
      worst_sc_fd = std::max(worst_sc_fd,
                             std::abs(one_sided_fd(sc, expected[i], 1e-3, s->side) - s->sc_prime));
      worst_poa_fd = std::max(
          worst_poa_fd,
          std::abs(one_sided_fd(poa, expected[i], 1e-3, s->side) - s->poa_prime.value_or(NAN)));
    }
  }
  o.check(worst_loc <= 1e-5, "locations within 1e-5");
  o.check(worst_sc_fd <= 1e-5, "SC' matches finite differences");
  o.check(worst_poa_fd <= 1e-4, "PoA' matches finite differences");
  o.detail << "; max location err " << num(worst_loc) << ", FD dev SC' " << num(worst_sc_fd)
           << ", PoA' " << num(worst_poa_fd);
}

void ac4(Outcome& o) {
  const Instance tl = corpus("twolink");
  const double r2 = std::sqrt(2.0);
  const auto x = [&](double mu) { return solve_equilibrium(tl.game, tl.demand.mu(mu)).loads; };
  double worst = 0.0;
  for (double mu : {1.0, 1.9, 2.0, 2.1, 3.0}) {
    const Vector got = x(mu);
    const double x1 = mu < 2 ? mu / 2 : (r2 * mu - r2 + 1) / (r2 + 1);
    const double x2 = mu < 2 ? mu / 2 : (mu + r2 - 1) / (r2 + 1);
    worst = std::max({worst, std::abs(got[0] - x1), std::abs(got[1] - x2)});
  }
  const double h = 1e-3, d = 1e-2;
  const double left = (x(2 - d + h)[0] - x(2 - d - h)[0]) / (2 * h);
  const double right = (x(2 + d + h)[0] - x(2 + d - h)[0]) / (2 * h);
  o.check(worst <= 1e-8, "loads within 1e-8");
  o.check(std::abs(right - left) > 0.05, "slope mismatch > 0.05");
  o.detail << "max load err " << num(worst) << ", dx1/dmu " << num(left) << " | " << num(right);
}

void ac5(Outcome& o) {
  for (double eps : {0.5, 1.0, 2.0}) {
    const Instance ce = corpus("contraction-expansion", eps);
    const BreakpointReport r = classify_breakpoint(ce.game, ce.demand, 2.0);
    const double l = r.left.lambda_prime[0], rt = r.right.lambda_prime[0];
    const double want_l = eps / (1 + 2 * eps);
    o.check(std::abs(l - want_l) <= 1e-6, "lambda'(2-) at eps " + num(eps));
    o.check(std::abs(rt - 1.0 / 3.0) <= 1e-6, "lambda'(2+) at eps " + num(eps));
    const char* order = std::abs(l - rt) <= 1e-6 ? "=" : (l > rt ? ">" : "<");
    const char* implied = eps < 1 ? "<" : (eps == 1 ? "=" : ">");
    o.check(std::string(order) == implied, "ordering at eps " + num(eps));
    o.detail << "eps " << num(eps) << ": " << num(l) << " " << order << " " << num(rt) << " ("
             << to_string(r.relation) << "); ";
  }
  o.detail << "orderings follow eps/(1+2eps) vs 1/3";
}

void ac6(Outcome& o) {
  const Instance we = corpus("watling-equality");
  const BreakpointReport r = classify_breakpoint(we.game, we.demand, 1.0);
  o.check(std::abs(r.left.lambda_prime[0]) <= 1e-6, "lambda'(1-) = 0");
  o.check(std::abs(r.right.lambda_prime[0]) <= 1e-6, "lambda'(1+) = 0");
  o.detail << "lambda' " << num(r.left.lambda_prime[0]) << " | " << num(r.right.lambda_prime[0])
           << ", relation " << to_string(r.relation);
}

struct CorpusCurve {
  std::string label;
  Instance inst;
  double t0, t1;
};

std::vector<CorpusCurve> corpus_curves() {
  std::vector<CorpusCurve> out;
  out.push_back({"fig1", corpus("fig1"), 0.0, 16.0});
  out.push_back({"fisk", corpus("fisk"), 0.0, 30.0});
  for (double eps : {0.5, 1.0, 2.0})
    out.push_back({"contraction-expansion(" + num(eps) + ")",
                   corpus("contraction-expansion", eps), 0.0, 4.0});
  out.push_back({"twolink", corpus("twolink"), 0.0, 4.0});
  out.push_back({"wheatstone", corpus("wheatstone"), 0.0, 4.0});
  out.push_back({"watling-equality", corpus("watling-equality"), 0.0, 3.0});
  return out;
}

bool all_affine(const Game& g) {
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (!is_affine(g.cost(e))) return false;
  return true;
}

bool convex_total(const Game& g) {
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (!has_convex_total_cost(g.cost(e))) return false;
  return true;
}

void ac7(Outcome& o) {
  const std::vector<CorpusCurve> curves = corpus_curves();

  // (a) value-function gradient.
  double worst_grad = 0.0;
  int grad_cases = 0;
  {
    const Instance fisk = corpus("fisk");
    const std::vector<std::pair<double, std::vector<std::string>>> cases{
        {5.0, {"p1", "p2", "p4"}}, {20.0, {"p1", "p2", "p4"}}, {20.0, {"p1", "p2", "p3", "p4"}},
        {5.0, {"p1", "p2", "p3", "p4"}}};
    for (const auto& [t, ids] : cases) {
      const auto rep = check_value_gradient(fisk.game, Regime::from_ids(fisk.game, ids),
                                            fisk.demand.mu(t));
      worst_grad = std::max(worst_grad, rep.max_deviation());
      ++grad_cases;
    }
    const Instance fig = corpus("fig1");
    for (double t : {0.5, 2.0, 3.5, 5.0, 10.0, 15.0}) {
      const Regime r = solve_equilibrium(fig.game, fig.demand.mu(t)).regime;
      for (const Regime& reg : {r, Regime::all(fig.game)}) {
        const auto rep = check_value_gradient(fig.game, reg, fig.demand.mu(t));
        worst_grad = std::max(worst_grad, rep.max_deviation());
        ++grad_cases;
      }
    }
  }
  o.check(worst_grad <= 1e-5, "(a) gradient check");
  o.detail << "(a) " << grad_cases << " regimes, max dev " << num(worst_grad);

  // (b) duality certificate.
  double worst_dual = 0.0;
  int dual_cases = 0;
  for (const CorpusCurve& c : curves) {
    if (!all_affine(c.inst.game)) continue;
    for (int i = 0; i <= 20; ++i) {
      const double t = c.t0 + (c.t1 - c.t0) * i / 20.0;
      const Vector mu = c.inst.demand.mu(t);
      const EquilibriumResult eq = solve_equilibrium(c.inst.game, mu);
      worst_dual = std::max(worst_dual, std::abs(dual_certificate_affine(c.inst.game, mu, eq)));
      ++dual_cases;
    }
  }
  o.check(worst_dual <= 1e-8, "(b) duality gap");
  o.detail << "; (b) " << dual_cases << " equilibria, max |gap| " << num(worst_dual);

  // (c) QP value monotone under regime inclusion.
  int qp_cases = 0;
  double worst_qp = -INFINITY;
  for (const CorpusCurve& c : curves) {
    const Game& g = c.inst.game;
    for (double tb : locate_breakpoints(g, c.inst.demand, c.t0, c.t1)) {
      const BreakpointReport r = classify_breakpoint(g, c.inst.demand, tb);
      const DemandPoint dp = eval_demand(c.inst.demand, tb);
      const Vector x = solve_equilibrium(g, dp.mu).loads;
      std::vector<std::pair<Regime, Regime>> chains;  // (smaller, larger)
      const Regime u = r.regime_left.united(r.regime_right);
      const Regime n = r.regime_left.intersected(r.regime_right);
      for (const Regime* side : {&r.regime_left, &r.regime_right}) {
        if (!(*side == u)) chains.emplace_back(*side, u);
        if (!(*side == n) && n.covers_all_ods(g)) chains.emplace_back(n, *side);
      }
      for (const Vector* rates : {&dp.left_derivative, &dp.right_derivative})
        for (const auto& [small, large] : chains) {
          const double ts = theta_qp(g, x, small, *rates).theta;
          const double tl = theta_qp(g, x, large, *rates).theta;
          worst_qp = std::max(worst_qp, tl - ts - 1e-9 * (1.0 + std::abs(ts)));
          ++qp_cases;
        }
    }
  }
  o.check(worst_qp <= 0.0, "(c) QP monotonicity");
  o.detail << "; (c) " << qp_cases << " regime pairs, max excess " << num(std::max(worst_qp, 0.0));

  // (d) SC_opt midpoint convexity along linear curves.
  int conv_cases = 0;
  double worst_conv = -INFINITY;
  for (const CorpusCurve& c : curves) {
    if (!c.inst.demand.is_linear() || !convex_total(c.inst.game)) continue;
    const auto sc_opt = [&](double t) {
      return solve_social_optimum(c.inst.game, c.inst.demand.mu(t)).social_cost;
    };
    for (int i = 1; i < 40; ++i) {
      const double t = c.t0 + (c.t1 - c.t0) * i / 40.0;
      for (double d : {0.01, 0.1, 0.5}) {
        if (t - d < c.t0 || t + d > c.t1) continue;
        const double mid = sc_opt(t);
        const double avg = 0.5 * (sc_opt(t - d) + sc_opt(t + d));
        worst_conv = std::max(worst_conv, mid - avg - 1e-9 * (1.0 + std::abs(mid)));
        ++conv_cases;
      }
    }
  }
  o.check(worst_conv <= 0.0, "(d) SC_opt midpoint convexity");
  o.detail << "; (d) " << conv_cases << " midpoints, max excess " << num(std::max(worst_conv, 0.0));

  // (e) PoA >= 1 at 500 random sweep points.
  std::mt19937 rng(20240611);
  double worst_poa = INFINITY;
  int poa_cases = 0;
  for (const CorpusCurve& c : curves) {
    if (!convex_total(c.inst.game)) continue;
    const double hi = c.label == "fisk" ? 100.0 : c.t1;
    std::uniform_real_distribution<double> pick(c.t0, hi);
    for (int i = 0; i < 100; ++i) {
      worst_poa = std::min(worst_poa, price_of_anarchy(c.inst.game, c.inst.demand.mu(pick(rng))).poa);
      ++poa_cases;
    }
  }
  o.check(poa_cases == 500, "(e) 500 sweep points");
  o.check(worst_poa >= 1.0 - 1e-9, "(e) PoA >= 1");
  o.detail << "; (e) " << poa_cases << " points, min PoA " << num(worst_poa);

  // (f) pseudoinverse reconstruction.
  double worst_pinv = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Instance inst = i % 4 == 3
                              ? parse_instance(testing_support::random_two_od_instance(rng).json)
                              : curves[static_cast<std::size_t>(i % 5)].inst;
    const Incidence& inc = inst.game.incidence();
    const auto P = inc.delta.cols();
    Vector f0(P), f1(P);
    for (Eigen::Index p = 0; p < P; ++p) {
      f0[p] = 5.0 * unit(rng);
      f1[p] = 5.0 * unit(rng);
    }
    const Vector f = flow_selection_pseudoinverse(inc, f0, inc.delta * f0, inc.s * f0,
                                                  inc.delta * f1, inc.s * f1);
    worst_pinv = std::max({worst_pinv, (inc.delta * f - inc.delta * f1).cwiseAbs().maxCoeff(),
                           (inc.s * f - inc.s * f1).cwiseAbs().maxCoeff()});
  }
  o.check(worst_pinv <= 1e-9, "(f) pseudoinverse residual");
  o.detail << "; (f) 100 pairs, max residual " << num(worst_pinv);
}

void ac8(Outcome& o) {
  std::mt19937 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const testing_support::RandomInstance ri = testing_support::random_two_od_instance(rng);
    const Instance inst = parse_instance(ri.json);
    const double sc = solve_equilibrium(inst.game, inst.demand.mu(1.0)).social_cost;
    const oracle::GridSolution g =
        oracle::grid_minimize(ri.problem(false), ri.num_edges, {0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    double sc_oracle = 0.0;
    for (std::size_t e = 0; e < ri.num_edges; ++e)
      sc_oracle += g.x[e] * (ri.a[e] * g.x[e] + ri.b[e]);
    worst = std::max(worst, std::abs(sc - sc_oracle));
  }
  o.check(worst <= 1e-3, "SC_eq vs grid oracle");
  o.detail << "20 instances, max |SC_eq - oracle| " << num(worst);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria{
      {"Fisk SC_eq and PoA closed forms", ac1},
      {"Fisk breakpoint derivatives at t = 11", ac2},
      {"fig1 breakpoint scan and classification", ac3},
      {"two-link nondifferentiable loads", ac4},
      {"contraction-expansion derivative trichotomy", ac5},
      {"equality case derivatives", ac6},
      {"property suite", ac7},
      {"grid oracle cross-check", ac8}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("AC%zu %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
