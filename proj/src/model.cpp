#include "poa/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "poa/error.hpp"

namespace poa {

Network::Network(std::vector<std::string> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertex_index_.emplace(vertices_[i], i).second)
      throw ModelError("duplicate vertex id '" + vertices_[i] + "'");
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.id.empty()) throw ModelError("edge with empty id");
    if (!edge_index_.emplace(e.id, i).second)
      throw ModelError("duplicate edge id '" + e.id + "'");
    if (!has_vertex(e.tail) || !has_vertex(e.head))
      throw ModelError("edge '" + e.id + "' has an undeclared endpoint");
    validate(e.cost);
  }
}

bool Network::has_vertex(const std::string& v) const {
  return vertex_index_.count(v) > 0;
}

std::optional<std::size_t> Network::find_edge(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::edge_index(const std::string& id) const {
  auto idx = find_edge(id);
  if (!idx) throw ModelError("unknown edge id '" + id + "'");
  return *idx;
}

Incidence build_incidence(const Network& network,
                          const std::vector<Commodity>& commodities) {
  Incidence inc;
  std::set<std::string> od_ids;
  std::set<std::string> path_ids;
  for (std::size_t h = 0; h < commodities.size(); ++h) {
    const Commodity& c = commodities[h];
    if (!od_ids.insert(c.id).second)
      throw ModelError("duplicate OD id '" + c.id + "'");
    if (!network.has_vertex(c.origin) || !network.has_vertex(c.destination))
      throw ModelError("OD '" + c.id + "' has an undeclared endpoint");
    if (c.origin == c.destination)
      throw ModelError("OD '" + c.id + "' has equal origin and destination");
    if (c.paths.empty()) throw ModelError("OD '" + c.id + "' has no paths");

    inc.od_paths.emplace_back();
    for (const Path& p : c.paths) {
      if (!path_ids.insert(p.id).second)
        throw ModelError("duplicate path id '" + p.id + "'");
      if (!p.od.empty() && p.od != c.id)
        throw ModelError("path '" + p.id + "' claims OD '" + p.od +
                         "' but is listed under '" + c.id + "'");
      if (p.edges.empty()) throw ModelError("path '" + p.id + "' is empty");

      std::vector<std::size_t> edges;
      std::set<std::string> seen{c.origin};
      std::string at = c.origin;
      for (const std::string& eid : p.edges) {
        auto idx = network.find_edge(eid);
        if (!idx)
          throw ModelError("path '" + p.id + "' references unknown edge '" +
                           eid + "'");
        const Edge& e = network.edge(*idx);
        if (e.tail != at)
          throw ModelError("path '" + p.id + "' does not chain at edge '" +
                           eid + "'");
        if (!seen.insert(e.head).second)
          throw ModelError("path '" + p.id + "' is not simple (revisits '" +
                           e.head + "')");
        at = e.head;
        edges.push_back(*idx);
      }
      if (at != c.destination)
        throw ModelError("path '" + p.id + "' does not end at destination '" +
                         c.destination + "'");

      inc.od_paths.back().push_back(inc.path_ids.size());
      inc.path_ids.push_back(p.id);
      inc.path_od.push_back(h);
      inc.path_edges.push_back(std::move(edges));
    }
  }

  const auto num_paths = static_cast<Eigen::Index>(inc.path_ids.size());
  inc.delta = Matrix::Zero(static_cast<Eigen::Index>(network.num_edges()), num_paths);
  inc.s = Matrix::Zero(static_cast<Eigen::Index>(commodities.size()), num_paths);
  for (Eigen::Index p = 0; p < num_paths; ++p) {
    for (std::size_t e : inc.path_edges[p]) inc.delta(static_cast<Eigen::Index>(e), p) = 1.0;
    inc.s(static_cast<Eigen::Index>(inc.path_od[p]), p) = 1.0;
  }
  return inc;
}

Vector loads_from_flow(const Incidence& inc, const Vector& f) {
  if (static_cast<std::size_t>(f.size()) != inc.num_paths())
    throw ModelError("flow vector has dimension " + std::to_string(f.size()) +
                     ", expected " + std::to_string(inc.num_paths()));
  return inc.delta * f;
}

bool check_feasible(const Incidence& inc, const Vector& f, const Vector& mu,
                    double tol) {
  if (static_cast<std::size_t>(f.size()) != inc.num_paths() ||
      static_cast<std::size_t>(mu.size()) != inc.num_ods())
    throw ModelError("dimension mismatch in feasibility check");
  if (f.size() > 0 && f.minCoeff() < -tol) return false;
  if (mu.size() == 0) return true;
  return (inc.s * f - mu).cwiseAbs().maxCoeff() <= tol;
}

std::vector<Path> enumerate_paths(const Network& network,
                                  const std::string& origin,
                                  const std::string& destination,
                                  std::size_t max_paths) {
  if (!network.has_vertex(origin) || !network.has_vertex(destination))
    throw ModelError("path enumeration endpoint not in network");
  if (origin == destination)
    throw ModelError("path enumeration needs distinct endpoints");

  std::unordered_map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < network.num_edges(); ++i)
    out[network.edge(i).tail].push_back(i);
  for (auto& [v, list] : out) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return network.edge(a).id < network.edge(b).id;
    });
  }

  std::vector<Path> paths;
  std::vector<std::string> stack;
  std::set<std::string> on_path{origin};
  std::function<void(const std::string&)> dfs = [&](const std::string& at) {
    if (at == destination) {
      Path p;
      for (std::size_t i = 0; i < stack.size(); ++i)
        p.id += (i ? "/" : "") + stack[i];
      p.edges = stack;
      paths.push_back(std::move(p));
      if (paths.size() > max_paths)
        throw ModelError("more than " + std::to_string(max_paths) +
                         " paths from '" + origin + "' to '" + destination +
                         "'");
      return;
    }
    auto it = out.find(at);
    if (it == out.end()) return;
    for (std::size_t e : it->second) {
      const Edge& edge = network.edge(e);
      if (on_path.count(edge.head)) continue;
      on_path.insert(edge.head);
      stack.push_back(edge.id);
      dfs(edge.head);
      stack.pop_back();
      on_path.erase(edge.head);
    }
  };
  dfs(origin);
  return paths;
}

std::pair<Network, std::vector<Commodity>> disjointify(
    const Network& network, const std::vector<Commodity>& commodities) {
  std::set<std::vector<std::string>> claimed;
  std::vector<bool> rewire(commodities.size(), false);
  for (std::size_t h = 0; h < commodities.size(); ++h) {
    for (const Path& p : commodities[h].paths)
      if (claimed.count(p.edges)) rewire[h] = true;
    for (const Path& p : commodities[h].paths) claimed.insert(p.edges);
  }
  if (std::none_of(rewire.begin(), rewire.end(), [](bool b) { return b; }))
    return {network, commodities};

  std::vector<std::string> vertices = network.vertices();
  std::vector<Edge> edges = network.edges();
  std::set<std::string> vertex_names(vertices.begin(), vertices.end());
  std::set<std::string> edge_names;
  for (const Edge& e : edges) edge_names.insert(e.id);
  const auto fresh = [](std::set<std::string>& used, std::string base) {
    std::string name = base;
    for (int k = 2; used.count(name); ++k) name = base + "#" + std::to_string(k);
    used.insert(name);
    return name;
  };

  std::vector<Commodity> out = commodities;
  for (std::size_t h = 0; h < out.size(); ++h) {
    if (!rewire[h]) continue;
    Commodity& c = out[h];
    const std::string dummy = fresh(vertex_names, "~" + c.origin + "@" + c.id);
    const std::string link = fresh(edge_names, "~" + c.id);
    vertices.push_back(dummy);
    edges.push_back(Edge{link, dummy, c.origin, Affine{0.0, 0.0}});
    for (Path& p : c.paths) p.edges.insert(p.edges.begin(), link);
    c.origin = dummy;
  }
  return {Network(std::move(vertices), std::move(edges)), std::move(out)};
}

Game::Game(Network network, std::vector<Commodity> commodities)
    : network_(std::move(network)), commodities_(std::move(commodities)) {
  incidence_ = build_incidence(network_, commodities_);
  for (Commodity& c : commodities_)
    for (Path& p : c.paths) p.od = c.id;
  for (std::size_t p = 0; p < incidence_.path_ids.size(); ++p)
    path_index_.emplace(incidence_.path_ids[p], p);
}

std::optional<std::size_t> Game::find_path(const std::string& id) const {
  auto it = path_index_.find(id);
  if (it == path_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Game::path_index(const std::string& id) const {
  auto p = find_path(id);
  if (!p) throw ModelError("unknown path id '" + id + "'");
  return *p;
}

Game Game::with_costs(const std::vector<CostFunction>& costs) const {
  if (costs.size() != num_edges())
    throw ModelError("cost vector does not match edge count");
  std::vector<Edge> edges = network_.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) edges[e].cost = costs[e];
  return Game(Network(network_.vertices(), std::move(edges)), commodities_);
}

std::vector<CostFunction> Game::costs() const {
  std::vector<CostFunction> out;
  out.reserve(num_edges());
  for (const Edge& e : network_.edges()) out.push_back(e.cost);
  return out;
}

Vector Game::edge_costs(const Vector& x) const {
  Vector c(x.size());
  for (Eigen::Index e = 0; e < x.size(); ++e)
    c[e] = eval(cost(static_cast<std::size_t>(e)), x[e]);
  return c;
}

Vector Game::path_costs(const Vector& x) const {
  return incidence_.delta.transpose() * edge_costs(x);
}

double Game::potential(const Vector& x) const {
  double v = 0.0;
  for (Eigen::Index e = 0; e < x.size(); ++e)
    v += primitive(cost(static_cast<std::size_t>(e)), x[e]);
  return v;
}

namespace {

void require_nonnegative(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
      throw ModelError(std::string("demand ") + what +
                       " must be finite and nonnegative");
}

}  // namespace

DemandCurve::DemandCurve(Kind kind, double t_min, double t_max)
    : kind_(std::move(kind)), t_min_(t_min), t_max_(t_max) {
  if (!(t_min_ <= t_max_) || !std::isfinite(t_min_))
    throw ModelError("demand domain must satisfy finite t_min <= t_max");
  // mu(t) >= 0 on the domain: affine pieces attain their minimum at an end.
  const auto check = [this](double t) {
    const Vector m = mu(t);
    for (Eigen::Index h = 0; h < m.size(); ++h)
      if (m[h] < 0.0)
        throw ModelError("demand curve is negative at t = " + std::to_string(t));
  };
  check(t_min_);
  if (std::isfinite(t_max_)) {
    check(t_max_);
  } else if (const auto* a = std::get_if<AffineDemand>(&kind_)) {
    if (a->slope.size() > 0 && a->slope.minCoeff() < 0.0)
      throw ModelError("decreasing affine demand needs a finite domain");
  }
  if (const auto* p = std::get_if<PiecewiseAffineDemand>(&kind_))
    for (double k : p->knots)
      if (contains(k)) check(k);
}

DemandCurve DemandCurve::linear(Vector rates, double t_min, double t_max) {
  require_nonnegative(rates, "rates");
  if (t_min < 0.0) throw ModelError("linear demand needs t_min >= 0");
  return DemandCurve(LinearDemand{std::move(rates)}, t_min, t_max);
}

DemandCurve DemandCurve::affine(Vector slope, Vector intercept, double t_min,
                                double t_max) {
  if (slope.size() != intercept.size())
    throw ModelError("affine demand slope/intercept dimension mismatch");
  return DemandCurve(AffineDemand{std::move(slope), std::move(intercept)}, t_min,
                     t_max);
}

DemandCurve DemandCurve::piecewise(std::vector<double> knots,
                                   std::vector<Vector> values) {
  if (knots.size() < 2 || knots.size() != values.size())
    throw ModelError("piecewise demand needs >= 2 knots with one value each");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1]))
      throw ModelError("piecewise demand knots must be strictly increasing");
    if (values[i].size() != values[0].size())
      throw ModelError("piecewise demand values have inconsistent dimension");
  }
  for (const Vector& v : values) require_nonnegative(v, "knot values");
  const double lo = knots.front();
  const double hi = knots.back();
  return DemandCurve(PiecewiseAffineDemand{std::move(knots), std::move(values)},
                     lo, hi);
}

std::size_t DemandCurve::num_ods() const {
  return std::visit(
      [](const auto& k) -> std::size_t {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LinearDemand>) {
          return static_cast<std::size_t>(k.rates.size());
        } else if constexpr (std::is_same_v<T, AffineDemand>) {
          return static_cast<std::size_t>(k.slope.size());
        } else {
          return k.values.empty() ? 0 : static_cast<std::size_t>(k.values[0].size());
        }
      },
      kind_);
}

namespace {

// Index i of the segment [knots[i], knots[i+1]] holding t, preferring the
// segment to the right at interior knots.
std::size_t segment_of(const PiecewiseAffineDemand& p, double t) {
  const auto it = std::upper_bound(p.knots.begin(), p.knots.end(), t);
  auto i = static_cast<std::size_t>(std::distance(p.knots.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, p.knots.size() - 2);
}

Vector segment_slope(const PiecewiseAffineDemand& p, std::size_t i) {
  return (p.values[i + 1] - p.values[i]) / (p.knots[i + 1] - p.knots[i]);
}

}  // namespace

Vector DemandCurve::mu(double t) const {
  return std::visit(
      [t](const auto& k) -> Vector {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LinearDemand>) {
          return t * k.rates;
        } else if constexpr (std::is_same_v<T, AffineDemand>) {
          return k.slope * t + k.intercept;
        } else {
          const std::size_t i = segment_of(k, t);
          const double w = (t - k.knots[i]) / (k.knots[i + 1] - k.knots[i]);
          return (1.0 - w) * k.values[i] + w * k.values[i + 1];
        }
      },
      kind_);
}

DemandPoint eval_demand(const DemandCurve& curve, double t) {
  if (!curve.contains(t)) {
    std::ostringstream msg;
    msg << "t = " << t << " outside demand domain [" << curve.t_min() << ", "
        << curve.t_max() << "]";
    throw DomainError(msg.str());
  }
  DemandPoint out;
  out.mu = curve.mu(t);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LinearDemand>) {
          out.left_derivative = k.rates;
          out.right_derivative = k.rates;
        } else if constexpr (std::is_same_v<T, AffineDemand>) {
          out.left_derivative = k.slope;
          out.right_derivative = k.slope;
        } else {
          const std::size_t i = segment_of(k, t);
          out.right_derivative = segment_slope(k, i);
          const bool at_interior_knot = i > 0 && t == k.knots[i];
          out.left_derivative =
              at_interior_knot ? segment_slope(k, i - 1) : out.right_derivative;
        }
      },
      curve.kind());
  return out;
}

}  // namespace poa
