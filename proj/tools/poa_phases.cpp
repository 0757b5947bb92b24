// poa_phases: equilibria, Price of Anarchy sweeps and regime breakpoints for
// routing games along a demand curve.

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "poa/corpus.hpp"
#include "poa/error.hpp"
#include "poa/io.hpp"
#include "poa/parallel.hpp"
#include "poa/sensitivity.hpp"

namespace {

using namespace poa;

constexpr int kUsage = 1;
constexpr int kSolverFailure = 2;

struct Common {
  std::string instance;
  std::string out;
  double tol_gap = SolverOptions{}.tol_gap;
  double eps_active = SolverOptions{}.eps_active;
  int max_iters = SolverOptions{}.max_iters;
  int fw_iters = SolverOptions{}.fw_iters;
};

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol-gap", c.tol_gap, "Wardrop gap tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--eps-active", c.eps_active, "relative slack for active paths")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", c.max_iters, "active-set iteration limit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fw-iters", c.fw_iters, "Frank-Wolfe iteration limit")
      ->check(CLI::NonNegativeNumber);
}

SolverOptions solver_options(const Common& c, const Instance& inst) {
  SolverOptions o;
  o.tol_gap = c.tol_gap;
  o.eps_active = c.eps_active;
  o.max_iters = c.max_iters;
  o.fw_iters = c.fw_iters;
  return options_for(inst, o);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : "") + v[i];
  return out;
}

int cmd_solve(const Common& c, double t) {
  const Instance inst = load_instance(c.instance);
  const SolverOptions opts = solver_options(c, inst);
  const Vector mu = eval_demand(inst.demand, t).mu;
  Json doc;
  doc["t"] = t;
  try {
    const PoaResult res = price_of_anarchy(inst.game, mu, opts);
    const Json body = poa_to_json(inst.game, res);
    for (const auto& [k, v] : body.items()) doc[k] = v;
  } catch (const NonConvexError& e) {
    const EquilibriumResult eq = solve_equilibrium(inst.game, mu, opts);
    doc["sc_eq"] = eq.social_cost;
    doc["sc_opt"] = nullptr;
    doc["poa"] = nullptr;
    doc["equilibrium"] = equilibrium_to_json(inst.game, eq);
    doc["optimum"] = nullptr;
    doc["note"] = std::string("social optimum unavailable: ") + e.what();
  }
  emit(c.out, doc.dump(2) + "\n");
  return 0;
}

struct SweepRow {
  double t = 0.0;
  Vector mu;
  double sc_eq = 0.0;
  std::optional<double> sc_opt;
  std::optional<double> poa;
  Vector lambda;
  std::vector<std::string> regime;
};

int cmd_sweep(const Common& c, double t0, double t1, std::size_t n,
              const std::string& format) {
  if (n < 2) throw DomainError("--n must be at least 2");
  const Instance inst = load_instance(c.instance);
  const SolverOptions opts = solver_options(c, inst);
  std::vector<SweepRow> rows(n);
  parallel_for(n, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.t = i + 1 == n ? t1
                       : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    row.mu = eval_demand(inst.demand, row.t).mu;
    const EquilibriumResult eq = solve_equilibrium(inst.game, row.mu, opts);
    row.sc_eq = eq.social_cost;
    row.lambda = eq.od_costs;
    row.regime = eq.regime.ids(inst.game);
    try {
      row.sc_opt = solve_social_optimum(inst.game, row.mu, opts).social_cost;
      row.poa = row.mu.cwiseAbs().maxCoeff() == 0.0 || *row.sc_opt <= 0.0
                    ? 1.0
                    : row.sc_eq / *row.sc_opt;
    } catch (const NonConvexError&) {
    }
  });

  std::vector<std::string> ods;
  for (const Commodity& com : inst.game.commodities()) ods.push_back(com.id);
  std::ostringstream out;
  if (format == "json") {
    Json arr = Json::array();
    for (const SweepRow& r : rows) {
      Json mu = Json::object(), lam = Json::object();
      for (std::size_t h = 0; h < ods.size(); ++h) {
        mu[ods[h]] = r.mu[static_cast<Eigen::Index>(h)];
        lam[ods[h]] = r.lambda[static_cast<Eigen::Index>(h)];
      }
      arr.push_back({{"t", r.t},
                     {"mu", mu},
                     {"sc_eq", r.sc_eq},
                     {"sc_opt", r.sc_opt ? Json(*r.sc_opt) : Json(nullptr)},
                     {"poa", r.poa ? Json(*r.poa) : Json(nullptr)},
                     {"lambda", lam},
                     {"regime", r.regime}});
    }
    out << arr.dump(2) << "\n";
  } else {
    out << "#schema=poa-sweep-v1\n";
    out << "t";
    for (const auto& od : ods) out << ",mu_" << od;
    out << ",sc_eq,sc_opt,poa";
    for (const auto& od : ods) out << ",lambda_" << od;
    out << ",regime_hash,regime\n";
    for (const SweepRow& r : rows) {
      out << fmt(r.t);
      for (Eigen::Index h = 0; h < r.mu.size(); ++h) out << "," << fmt(r.mu[h]);
      out << "," << fmt(r.sc_eq) << "," << (r.sc_opt ? fmt(*r.sc_opt) : "") << ","
          << (r.poa ? fmt(*r.poa) : "");
      for (Eigen::Index h = 0; h < r.lambda.size(); ++h) out << "," << fmt(r.lambda[h]);
      char hash[24];
      std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(join(r.regime, ',')));
      out << "," << hash << "," << join(r.regime, ';') << "\n";
    }
  }
  emit(c.out, out.str());
  return 0;
}

int cmd_breakpoints(const Common& c, double t0, double t1, std::size_t grid,
                    double tol_t, double eps_probe) {
  const Instance inst = load_instance(c.instance);
  const SolverOptions opts = solver_options(c, inst);
  BreakpointScanOptions scan;
  scan.grid_n = grid;
  scan.tol_t = tol_t;
  const std::vector<double> ts = locate_breakpoints(inst.game, inst.demand, t0, t1, scan, opts);
  std::vector<BreakpointReport> reports(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    reports[i] = classify_breakpoint(inst.game, inst.demand, ts[i], eps_probe, opts);
  });
  Json arr = Json::array();
  for (const BreakpointReport& r : reports) arr.push_back(breakpoint_to_json(inst.game, r));
  emit(c.out, arr.dump(2) + "\n");
  return 0;
}

int cmd_fixed_regime(const Common& c, double t, const std::string& regime_ids) {
  const Instance inst = load_instance(c.instance);
  const SolverOptions opts = solver_options(c, inst);
  std::vector<std::string> ids;
  std::stringstream ss(regime_ids);
  for (std::string id; std::getline(ss, id, ',');)
    if (!id.empty()) ids.push_back(id);
  Regime regime;
  try {
    regime = Regime::from_ids(inst.game, ids);
  } catch (const ModelError& e) {
    throw ParseError(std::string("--regime: ") + e.what());
  }
  const RelaxedSolution sol =
      solve_fixed_regime(inst.game, regime, eval_demand(inst.demand, t).mu, opts.newton);
  Json doc = relaxed_to_json(inst.game, sol, is_wardrop_consistent(inst.game, sol));
  emit(c.out, doc.dump(2) + "\n");
  return 0;
}

int cmd_examples(const std::string& name, double eps, const std::string& out) {
  emit(out, example_instance(name, eps).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wardrop equilibria, Price of Anarchy sweeps and regime breakpoints"};
  app.require_subcommand(1);
  Common common;
  double t = 0.0, t0 = 0.0, t1 = 1.0, tol_t = 1e-7, eps_probe = 0.0, eps = 1.0;
  std::size_t n = 101, grid = 161;
  std::string format = "csv", regime, name;

  CLI::App* solve = app.add_subcommand("solve", "equilibrium, optimum and PoA at one t");
  solve->add_option("instance", common.instance, "instance JSON")->required();
  solve->add_option("--t", t, "curve parameter")->required();
  solve->add_option("--out", common.out, "output file (default stdout)");
  add_solver_flags(solve, common);

  CLI::App* sweep = app.add_subcommand("sweep", "PoA along a uniform grid of t");
  sweep->add_option("instance", common.instance, "instance JSON")->required();
  sweep->add_option("--t0", t0, "first t")->required();
  sweep->add_option("--t1", t1, "last t")->required();
  sweep->add_option("--n", n, "number of grid points")->check(CLI::Range(2, 100000000));
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", common.out, "output file (default stdout)");
  add_solver_flags(sweep, common);

  CLI::App* bps = app.add_subcommand("breakpoints", "locate and classify regime changes");
  bps->add_option("instance", common.instance, "instance JSON")->required();
  bps->add_option("--t0", t0, "range start")->required();
  bps->add_option("--t1", t1, "range end")->required();
  bps->add_option("--grid", grid, "sampling points")->check(CLI::Range(2, 100000000));
  bps->add_option("--tol-t", tol_t, "bisection tolerance")->check(CLI::PositiveNumber);
  bps->add_option("--eps-probe", eps_probe, "one-sided probe offset (default 1e-4 (1+|t|))")
      ->check(CLI::PositiveNumber);
  bps->add_option("--out", common.out, "output file (default stdout)");
  add_solver_flags(bps, common);

  CLI::App* fixed = app.add_subcommand("fixed-regime", "relaxed fixed-regime solution");
  fixed->add_option("instance", common.instance, "instance JSON")->required();
  fixed->add_option("--t", t, "curve parameter")->required();
  fixed->add_option("--regime", regime, "comma-separated path ids")->required();
  fixed->add_option("--out", common.out, "output file (default stdout)");
  add_solver_flags(fixed, common);

  CLI::App* examples = app.add_subcommand("examples", "write a built-in instance");
  examples->add_option("name", name, "example name")
      ->required()
      ->check(CLI::IsMember(poa::example_names()));
  examples->add_option("--eps", eps, "vertical edge weight for contraction-expansion")
      ->check(CLI::PositiveNumber);
  examples->add_option("--out", common.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*solve) return cmd_solve(common, t);
    if (*sweep) return cmd_sweep(common, t0, t1, n, format);
    if (*bps) return cmd_breakpoints(common, t0, t1, grid, tol_t, eps_probe);
    if (*fixed) return cmd_fixed_regime(common, t, regime);
    if (*examples) return cmd_examples(name, eps, common.out);
  } catch (const poa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const poa::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const poa::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const poa::Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}
