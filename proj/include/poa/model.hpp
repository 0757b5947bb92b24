#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "poa/costs.hpp"

namespace poa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  CostFunction cost;
};

// Directed multigraph. Parallel edges are distinguished by id.
class Network {
 public:
  Network() = default;
  // Throws ModelError on duplicate ids or undeclared endpoints.
  Network(std::vector<std::string> vertices, std::vector<Edge> edges);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_[i]; }
  std::size_t num_edges() const { return edges_.size(); }

  bool has_vertex(const std::string& v) const;
  std::optional<std::size_t> find_edge(const std::string& id) const;
  // Throws ModelError for unknown ids.
  std::size_t edge_index(const std::string& id) const;

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> vertex_index_;
  std::unordered_map<std::string, std::size_t> edge_index_;
};

// Paths are edge-id sequences, never vertex sequences.
struct Path {
  std::string id;
  std::string od;
  std::vector<std::string> edges;
};

struct Commodity {
  std::string id;
  std::string origin;
  std::string destination;
  std::vector<Path> paths;
};

// Edge/path incidence (delta) and OD/path incidence (s). Columns follow OD
// order, then declared path order within the OD.
struct Incidence {
  Matrix delta;
  Matrix s;
  std::vector<std::string> path_ids;
  std::vector<std::size_t> path_od;
  std::vector<std::vector<std::size_t>> path_edges;
  std::vector<std::vector<std::size_t>> od_paths;

  std::size_t num_edges() const { return static_cast<std::size_t>(delta.rows()); }
  std::size_t num_paths() const { return static_cast<std::size_t>(delta.cols()); }
  std::size_t num_ods() const { return static_cast<std::size_t>(s.rows()); }
};

// Validates every path (known edges, chaining, simple, correct endpoints,
// unique ids) and assembles the incidence matrices. Throws ModelError.
Incidence build_incidence(const Network& network,
                          const std::vector<Commodity>& commodities);

Vector loads_from_flow(const Incidence& inc, const Vector& f);

// True iff |S f - mu|_inf <= tol and f >= -tol.
bool check_feasible(const Incidence& inc, const Vector& f, const Vector& mu,
                    double tol);

inline constexpr std::size_t kDefaultPathCap = 64;

// All simple directed paths from origin to destination, ordered
// lexicographically by edge-id sequence. Ids are the '/'-joined edge ids.
// Throws ModelError when more than max_paths paths exist.
std::vector<Path> enumerate_paths(const Network& network,
                                  const std::string& origin,
                                  const std::string& destination,
                                  std::size_t max_paths = kDefaultPathCap);

// Rewires every commodity that shares an edge sequence with an earlier one
// through a fresh origin joined to the old one by a zero-cost edge.
std::pair<Network, std::vector<Commodity>> disjointify(
    const Network& network, const std::vector<Commodity>& commodities);

struct FlowLoad {
  Vector f;
  Vector x;
};

// Immutable routing game structure: network, commodities and incidence.
class Game {
 public:
  Game() = default;
  Game(Network network, std::vector<Commodity> commodities);

  const Network& network() const { return network_; }
  const std::vector<Commodity>& commodities() const { return commodities_; }
  const Incidence& incidence() const { return incidence_; }

  std::size_t num_edges() const { return network_.num_edges(); }
  std::size_t num_paths() const { return incidence_.num_paths(); }
  std::size_t num_ods() const { return commodities_.size(); }
  const CostFunction& cost(std::size_t e) const { return network_.edge(e).cost; }

  std::optional<std::size_t> find_path(const std::string& id) const;
  std::size_t path_index(const std::string& id) const;
  const std::string& path_id(std::size_t p) const { return incidence_.path_ids[p]; }
  std::size_t od_of(std::size_t p) const { return incidence_.path_od[p]; }
  const std::vector<std::size_t>& path_edges(std::size_t p) const {
    return incidence_.path_edges[p];
  }
  const std::vector<std::size_t>& od_paths(std::size_t h) const {
    return incidence_.od_paths[h];
  }

  // Same structure with per-edge costs replaced.
  Game with_costs(const std::vector<CostFunction>& costs) const;

  std::vector<CostFunction> costs() const;
  Vector edge_costs(const Vector& x) const;
  Vector path_costs(const Vector& x) const;
  double potential(const Vector& x) const;

 private:
  Network network_;
  std::vector<Commodity> commodities_;
  Incidence incidence_;
  std::unordered_map<std::string, std::size_t> path_index_;
};

// mu(t) = t r.
struct LinearDemand {
  Vector rates;
};

// mu(t) = slope t + intercept.
struct AffineDemand {
  Vector slope;
  Vector intercept;
};

// Linear interpolation between per-OD values at increasing knots.
struct PiecewiseAffineDemand {
  std::vector<double> knots;
  std::vector<Vector> values;
};

struct DemandPoint {
  Vector mu;
  Vector left_derivative;
  Vector right_derivative;
};

// One-parameter demand curve on a closed domain [t_min, t_max]. Construction
// rejects curves that leave the nonnegative orthant on the domain.
class DemandCurve {
 public:
  using Kind = std::variant<LinearDemand, AffineDemand, PiecewiseAffineDemand>;

  DemandCurve() = default;
  static DemandCurve linear(Vector rates, double t_min = 0.0,
                            double t_max = std::numeric_limits<double>::infinity());
  static DemandCurve affine(Vector slope, Vector intercept, double t_min = 0.0,
                            double t_max = std::numeric_limits<double>::infinity());
  // Domain defaults to [knots.front(), knots.back()].
  static DemandCurve piecewise(std::vector<double> knots,
                               std::vector<Vector> values);

  const Kind& kind() const { return kind_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  std::size_t num_ods() const;
  bool is_linear() const { return std::holds_alternative<LinearDemand>(kind_); }
  bool contains(double t) const { return t >= t_min_ && t <= t_max_; }

  Vector mu(double t) const;

 private:
  DemandCurve(Kind kind, double t_min, double t_max);

  Kind kind_ = LinearDemand{};
  double t_min_ = 0.0;
  double t_max_ = 0.0;
};

// mu(t) with exact one-sided derivatives. Throws DomainError outside the
// curve's domain.
DemandPoint eval_demand(const DemandCurve& curve, double t);

}  // namespace poa
