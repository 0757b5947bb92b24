#include "poa/io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "poa/error.hpp"

namespace poa {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> strings(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(text(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

DemandCurve parse_demand(const Json& j, std::size_t num_ods) {
  const std::string where = "demand";
  const std::string type = text(field(j, "type", where), where + ".type");
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
  bool has_domain = false;
  if (const auto it = j.find("domain"); it != j.end()) {
    if (!it->is_array() || it->size() != 2) fail(where + ".domain", "expected [t_min, t_max]");
    t_min = number((*it)[0], where + ".domain[0]");
    if (!(*it)[1].is_null()) t_max = number((*it)[1], where + ".domain[1]");
    has_domain = true;
  }
  const auto check_dim = [&](const std::vector<double>& v, const std::string& at) {
    if (v.size() != num_ods)
      fail(at, "expected " + std::to_string(num_ods) + " entries, one per commodity");
  };
  if (type == "linear") {
    const auto rates = numbers(field(j, "rates", where), where + ".rates");
    check_dim(rates, where + ".rates");
    return DemandCurve::linear(to_vector(rates), t_min, t_max);
  }
  if (type == "affine") {
    const auto slope = numbers(field(j, "slope", where), where + ".slope");
    const auto intercept = numbers(field(j, "intercept", where), where + ".intercept");
    check_dim(slope, where + ".slope");
    check_dim(intercept, where + ".intercept");
    return DemandCurve::affine(to_vector(slope), to_vector(intercept), t_min, t_max);
  }
  if (type == "piecewise") {
    if (has_domain) fail(where + ".domain", "piecewise demand takes its domain from the knots");
    const auto knots = numbers(field(j, "knots", where), where + ".knots");
    const Json& vals = field(j, "values", where);
    if (!vals.is_array()) fail(where + ".values", "expected an array of arrays");
    std::vector<Vector> values;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::string at = where + ".values[" + std::to_string(i) + "]";
      const auto v = numbers(vals[i], at);
      check_dim(v, at);
      values.push_back(to_vector(v));
    }
    return DemandCurve::piecewise(knots, std::move(values));
  }
  fail(where + ".type", "unknown demand type '" + type + "'");
}

Json id_map(const std::vector<std::string>& ids, const Vector& v) {
  Json out = Json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = v[static_cast<Eigen::Index>(i)];
  return out;
}

std::vector<std::string> edge_ids(const Game& game) {
  std::vector<std::string> ids;
  for (const Edge& e : game.network().edges()) ids.push_back(e.id);
  return ids;
}

std::vector<std::string> od_ids(const Game& game) {
  std::vector<std::string> ids;
  for (const Commodity& c : game.commodities()) ids.push_back(c.id);
  return ids;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

CostFunction parse_cost(const Json& j, const std::string& where) {
  const std::string type = text(field(j, "type", where), where + ".type");
  const auto num = [&](const char* key) { return number(field(j, key, where), where + "." + key); };
  if (type == "affine") return make_affine(num("a"), num("b"));
  if (type == "poly")
    return make_polynomial(numbers(field(j, "coeffs", where), where + ".coeffs"));
  if (type == "bpr") return make_bpr(num("t0"), num("cap"), num("alpha"), num("beta"));
  if (type == "piecewise")
    return make_piecewise(num("x0"), numbers(field(j, "left", where), where + ".left"),
                          numbers(field(j, "right", where), where + ".right"));
  fail(where + ".type", "unknown cost type '" + type + "'");
}

Json cost_to_json(const CostFunction& c) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Affine>) {
          return {{"type", "affine"}, {"a", f.a}, {"b", f.b}};
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return {{"type", "poly"}, {"coeffs", f.coeffs}};
        } else if constexpr (std::is_same_v<T, Bpr>) {
          return {{"type", "bpr"}, {"t0", f.t0}, {"cap", f.capacity},
                  {"alpha", f.alpha}, {"beta", f.beta}};
        } else {
          return {{"type", "piecewise"}, {"x0", f.x0}, {"left", f.left}, {"right", f.right}};
        }
      },
      c);
}

Instance parse_instance(const Json& doc) {
  if (!doc.is_object()) fail("instance", "expected an object");
  Instance inst;
  if (const auto it = doc.find("name"); it != doc.end()) inst.name = text(*it, "name");
  if (const auto it = doc.find("extension_slope"); it != doc.end()) {
    inst.extension_slope = number(*it, "extension_slope");
    if (!(inst.extension_slope > 0.0)) fail("extension_slope", "must be positive");
  }
  if (const auto it = doc.find("path_cap"); it != doc.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() == 0)
      fail("path_cap", "expected a positive integer");
    inst.path_cap = it->get<std::size_t>();
  }

  const auto vertices = strings(field(doc, "vertices", "instance"), "vertices");
  const Json& jedges = field(doc, "edges", "instance");
  if (!jedges.is_array()) fail("edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const Json& je = jedges[i];
    edges.push_back(Edge{text(field(je, "id", where), where + ".id"),
                         text(field(je, "tail", where), where + ".tail"),
                         text(field(je, "head", where), where + ".head"),
                         parse_cost(field(je, "cost", where), where + ".cost")});
  }
  Network network(vertices, std::move(edges));

  const Json& jcom = field(doc, "commodities", "instance");
  if (!jcom.is_array() || jcom.empty()) fail("commodities", "expected a nonempty array");
  std::vector<Commodity> commodities;
  std::size_t column = 0;
  for (std::size_t h = 0; h < jcom.size(); ++h) {
    const std::string where = "commodities[" + std::to_string(h) + "]";
    const Json& jc = jcom[h];
    Commodity c;
    c.id = text(field(jc, "id", where), where + ".id");
    c.origin = text(field(jc, "origin", where), where + ".origin");
    c.destination = text(field(jc, "destination", where), where + ".destination");
    const Json& jp = field(jc, "paths", where);
    if (jp.is_string()) {
      if (jp.get<std::string>() != "auto") fail(where + ".paths", "expected \"auto\" or a list");
      for (Path& p : enumerate_paths(network, c.origin, c.destination, inst.path_cap)) {
        p.id = "p" + std::to_string(++column);
        c.paths.push_back(std::move(p));
      }
    } else if (jp.is_array()) {
      for (std::size_t k = 0; k < jp.size(); ++k) {
        const std::string at = where + ".paths[" + std::to_string(k) + "]";
        Path p;
        ++column;
        if (jp[k].is_object()) {
          p.id = text(field(jp[k], "id", at), at + ".id");
          p.edges = strings(field(jp[k], "edges", at), at + ".edges");
        } else {
          p.id = "p" + std::to_string(column);
          p.edges = strings(jp[k], at);
        }
        c.paths.push_back(std::move(p));
      }
    } else {
      fail(where + ".paths", "expected \"auto\" or a list of paths");
    }
    if (c.paths.empty())
      fail(where + ".paths", "no path from '" + c.origin + "' to '" + c.destination + "'");
    commodities.push_back(std::move(c));
  }

  auto [net, coms] = disjointify(network, commodities);
  inst.game = Game(std::move(net), std::move(coms));
  inst.demand = parse_demand(field(doc, "demand", "instance"), inst.game.num_ods());
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << path << ":" << line << ":" << col << ": invalid JSON";
    throw ParseError(msg.str());
  }
  try {
    return parse_instance(doc);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

SolverOptions options_for(const Instance& inst, SolverOptions base) {
  base.newton.extension_slope = inst.extension_slope;
  return base;
}

Json equilibrium_to_json(const Game& game, const EquilibriumResult& res) {
  const auto& paths = game.incidence().path_ids;
  return {{"mu", id_map(od_ids(game), res.mu)},
          {"flows", id_map(paths, res.flows)},
          {"loads", id_map(edge_ids(game), res.loads)},
          {"edge_costs", id_map(edge_ids(game), res.edge_costs)},
          {"path_costs", id_map(paths, res.path_costs)},
          {"od_costs", id_map(od_ids(game), res.od_costs)},
          {"potential", res.potential},
          {"wardrop_gap", res.wardrop_gap},
          {"social_cost", res.social_cost},
          {"regime", res.regime.ids(game)},
          {"iterations",
           {{"frank_wolfe", res.fw_iterations}, {"active_set", res.active_set_iterations}}},
          {"loads_possibly_nonunique", res.loads_possibly_nonunique}};
}

Json poa_to_json(const Game& game, const PoaResult& res) {
  const SocialOptimum& opt = res.optimum;
  return {{"sc_eq", res.sc_eq},
          {"sc_opt", res.sc_opt},
          {"poa", res.poa},
          {"equilibrium", equilibrium_to_json(game, res.equilibrium)},
          {"optimum",
           {{"social_cost", opt.social_cost},
            {"flows", id_map(game.incidence().path_ids, opt.marginal.flows)},
            {"loads", id_map(edge_ids(game), opt.marginal.loads)},
            {"marginal_od_costs", id_map(od_ids(game), opt.marginal.od_costs)},
            {"regime", opt.marginal.regime.ids(game)}}}};
}

Json relaxed_to_json(const Game& game, const RelaxedSolution& sol,
                     const WardropConsistency& consistency) {
  const auto& paths = game.incidence().path_ids;
  Json nu = Json::object();
  for (std::size_t p = 0; p < paths.size(); ++p)
    if (!sol.regime.contains(p)) nu[paths[p]] = sol.nu[static_cast<Eigen::Index>(p)];
  return {{"regime", sol.regime.ids(game)},
          {"mu", id_map(od_ids(game), sol.mu)},
          {"flows", id_map(paths, sol.flows)},
          {"loads", id_map(edge_ids(game), sol.loads)},
          {"m", id_map(od_ids(game), sol.m)},
          {"eta", id_map(edge_ids(game), sol.eta)},
          {"nu", nu},
          {"residual", sol.residual},
          {"iterations", sol.iterations},
          {"load_degenerate", sol.load_degenerate},
          {"degenerate_cycle", sol.degenerate_cycle},
          {"consistency",
           {{"nonneg_flows", consistency.nonneg_flows},
            {"no_cheaper_outside", consistency.no_cheaper_outside},
            {"overall", consistency.overall}}}};
}

Json breakpoint_to_json(const Game& game, const BreakpointReport& rep) {
  const auto ods = od_ids(game);
  return {{"t", rep.t},
          {"eps_probe", rep.eps_probe},
          {"regime_left", rep.regime_left.ids(game)},
          {"regime_right", rep.regime_right.ids(game)},
          {"relation", to_string(rep.relation)},
          {"theta", {{"left", rep.left.qp.theta}, {"right", rep.right.qp.theta}}},
          {"sc_prime", {{"left", rep.left.sc_prime}, {"right", rep.right.sc_prime}}},
          {"poa_prime",
           {{"left", optional_number(rep.left.poa_prime)},
            {"right", optional_number(rep.right.poa_prime)}}},
          {"lambda_prime",
           {{"left", id_map(ods, rep.left.lambda_prime)},
            {"right", id_map(ods, rep.right.lambda_prime)}}},
          {"verdict", to_string(rep.verdict)},
          {"heuristic", rep.heuristic},
          {"annotations", rep.annotations}};
}

}  // namespace poa
