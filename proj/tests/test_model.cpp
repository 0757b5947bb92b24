#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "poa/corpus.hpp"
#include "poa/equilibrium.hpp"
#include "poa/error.hpp"
#include "poa/model.hpp"

using namespace poa;

namespace {

Instance corpus(const std::string& name) { return parse_instance(example_instance(name)); }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Game single_edge(CostFunction c = make_affine(1, 0)) {
  Network net({"O", "D"}, {{"e", "O", "D", c}});
  return Game(net, {{"od", "O", "D", {{"p", "od", {"e"}}}}});
}

}  // namespace

TEST(Incidence, Fig1PathColumn) {
  const Game g = corpus("fig1").game;
  ASSERT_EQ(g.incidence().delta.rows(), 7);
  ASSERT_EQ(g.incidence().delta.cols(), 5);
  const std::size_t p = g.path_index("p3");  // O -> v1 -> v2 -> D
  Vector expected = Vector::Zero(7);
  expected[0] = expected[2] = expected[4] = 1;
  EXPECT_EQ(Vector(g.incidence().delta.col(static_cast<Eigen::Index>(p))), expected);
}

TEST(Incidence, SingleEdge) {
  const Game g = single_edge();
  EXPECT_EQ(g.incidence().delta, Matrix::Ones(1, 1));
  EXPECT_EQ(g.incidence().s, Matrix::Ones(1, 1));
}

TEST(Incidence, FiskOdRows) {
  const Game g = corpus("fisk").game;
  ASSERT_EQ(g.incidence().s.rows(), 3);
  ASSERT_EQ(g.incidence().s.cols(), 4);
  EXPECT_EQ(Vector(g.incidence().s.row(1).transpose()), vec({0, 1, 1, 0}));
}

TEST(Incidence, RejectsBrokenPaths) {
  Network net({"O", "v", "D"}, {{"a", "O", "v", make_affine(1, 0)},
                                {"b", "v", "D", make_affine(1, 0)},
                                {"c", "O", "D", make_affine(1, 0)}});
  EXPECT_THROW(build_incidence(net, {{"od", "O", "D", {{"p", "od", {"b", "a"}}}}}), ModelError);
  EXPECT_THROW(build_incidence(net, {{"od", "O", "D", {{"p", "od", {"a"}}}}}), ModelError);
  EXPECT_THROW(build_incidence(net, {{"od", "O", "D", {{"p", "od", {"zz"}}}}}), ModelError);
  EXPECT_THROW(build_incidence(net, {{"od", "O", "D", {{"p", "od", {"c"}}, {"p", "od", {"a", "b"}}}}}),
               ModelError);
}

TEST(Network, RejectsDuplicatesAndUnknownVertices) {
  EXPECT_THROW(Network({"O", "D"}, {{"e", "O", "D", make_affine(1, 0)}, {"e", "O", "D", make_affine(1, 0)}}),
               ModelError);
  EXPECT_THROW(Network({"O"}, {{"e", "O", "D", make_affine(1, 0)}}), ModelError);
}

TEST(Loads, FromFlows) {
  const Game fisk = corpus("fisk").game;
  EXPECT_EQ(loads_from_flow(fisk.incidence(), Vector::Zero(4)), Vector::Zero(3));
  EXPECT_EQ(loads_from_flow(fisk.incidence(), vec({1, 7, 0, 100})), vec({1, 7, 100}));
  EXPECT_EQ(loads_from_flow(fisk.incidence(), vec({1, 0, 5, 100})), vec({6, 0, 105}));

  const Game fig = corpus("fig1").game;
  Vector f = Vector::Zero(5);
  f[static_cast<Eigen::Index>(fig.path_index("p3"))] = 1;
  EXPECT_EQ(loads_from_flow(fig.incidence(), f), vec({1, 0, 1, 0, 1, 0, 0}));
}

TEST(Feasibility, Examples) {
  const Game fisk = corpus("fisk").game;
  EXPECT_TRUE(check_feasible(fisk.incidence(), vec({1, 11, 0, 100}), vec({1, 11, 100}), 1e-9));
  const Game one = single_edge();
  EXPECT_FALSE(check_feasible(one.incidence(), vec({1}), vec({2}), 1e-9));
  EXPECT_FALSE(check_feasible(fisk.incidence(), vec({1, 12, -1, 100}), vec({1, 11, 100}), 1e-9));
}

TEST(PathEnumeration, Wheatstone) {
  const Game g = corpus("wheatstone").game;
  const auto paths = enumerate_paths(g.network(), "O", "D");
  std::vector<std::vector<std::string>> got;
  for (const auto& p : paths) got.push_back(p.edges);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::vector<std::string>>{{"e1", "e3"}, {"e1", "e5", "e4"}, {"e2", "e4"}}));
}

TEST(PathEnumeration, ParallelLinks) {
  Network net({"O", "D"}, {{"a", "O", "D", make_affine(1, 0)}, {"b", "O", "D", make_affine(1, 0)}});
  EXPECT_EQ(enumerate_paths(net, "O", "D").size(), 2u);
}

TEST(PathEnumeration, MatchesDfsOracle) {
  const Game g = corpus("fig1").game;
  std::vector<oracle::RawEdge> raw;
  for (const auto& e : g.network().edges()) raw.push_back({e.id, e.tail, e.head});
  const auto want = oracle::simple_paths(raw, "O", "D");
  std::vector<std::vector<std::string>> got;
  for (const auto& p : enumerate_paths(g.network(), "O", "D")) got.push_back(p.edges);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, want);
  EXPECT_EQ(got.size(), 5u);
}

TEST(PathEnumeration, CapIsEnforced) {
  std::vector<std::string> vs{"v0"};
  std::vector<Edge> edges;
  // Chain of 7 two-edge bundles: 2^7 = 128 paths.
  for (int i = 0; i < 7; ++i) {
    vs.push_back("v" + std::to_string(i + 1));
    for (int k = 0; k < 2; ++k)
      edges.push_back({"e" + std::to_string(i) + "_" + std::to_string(k), vs[i], vs[i + 1], make_affine(1, 0)});
  }
  Network net(vs, edges);
  EXPECT_THROW(enumerate_paths(net, "v0", "v7"), ModelError);
  EXPECT_EQ(enumerate_paths(net, "v0", "v7", 200).size(), 128u);
}

TEST(Disjointify, SharedPathIsRewiredWithSameLoads) {
  Network net({"O", "D"}, {{"a", "O", "D", make_affine(1, 0)}, {"b", "O", "D", make_affine(2, 1)}});
  const std::vector<Commodity> coms{{"h1", "O", "D", {{"p1", "h1", {"a"}}, {"p2", "h1", {"b"}}}},
                                    {"h2", "O", "D", {{"p3", "h2", {"a"}}, {"p4", "h2", {"b"}}}}};
  const auto [net2, coms2] = disjointify(net, coms);
  EXPECT_GT(net2.num_edges(), net.num_edges());
  EXPECT_NE(coms2[1].origin, "O");

  const Vector mu = vec({1.0, 2.0});
  const EquilibriumResult r = solve_equilibrium(Game(net2, coms2), mu);
  // Merged single-OD oracle: total demand 3 on a and b.
  const double xa = (3.0 * 2 + 1) / 3.0;
  EXPECT_NEAR(r.loads[static_cast<Eigen::Index>(*net2.find_edge("a"))], xa, 1e-9);
  EXPECT_NEAR(r.loads[static_cast<Eigen::Index>(*net2.find_edge("b"))], 3 - xa, 1e-9);
}

TEST(Disjointify, NoOpCases) {
  for (const std::string name : {"fisk", "fig1"}) {
    const Game g = corpus(name).game;
    const auto [net2, coms2] = disjointify(g.network(), g.commodities());
    EXPECT_EQ(net2.num_edges(), g.network().num_edges());
    ASSERT_EQ(coms2.size(), g.commodities().size());
    for (std::size_t h = 0; h < coms2.size(); ++h) EXPECT_EQ(coms2[h].origin, g.commodities()[h].origin);
  }
}

TEST(Demand, LinearDefinition) {
  const DemandPoint d = eval_demand(DemandCurve::linear(vec({1, 2})), 3.0);
  EXPECT_EQ(d.mu, vec({3, 6}));
  EXPECT_EQ(d.left_derivative, vec({1, 2}));
  EXPECT_EQ(d.right_derivative, vec({1, 2}));
}

TEST(Demand, FiskAffine) {
  const DemandPoint d = eval_demand(corpus("fisk").demand, 11.0);
  EXPECT_EQ(d.mu, vec({1, 11, 100}));
  EXPECT_EQ(d.left_derivative, vec({0, 1, 0}));
  EXPECT_EQ(d.right_derivative, vec({0, 1, 0}));
}

TEST(Demand, PiecewiseKnot) {
  const DemandCurve c = DemandCurve::piecewise({0, 2, 4}, {vec({0}), vec({2}), vec({8})});
  const DemandPoint d = eval_demand(c, 2.0);
  EXPECT_DOUBLE_EQ(d.mu[0], 2);
  EXPECT_DOUBLE_EQ(d.left_derivative[0], 1);
  EXPECT_DOUBLE_EQ(d.right_derivative[0], 3);
  EXPECT_DOUBLE_EQ(c.mu(3.0)[0], 5);
}

TEST(Demand, DomainAndSignChecks) {
  EXPECT_THROW(eval_demand(DemandCurve::linear(vec({1}), 0, 5), 6.0), DomainError);
  EXPECT_THROW(DemandCurve::affine(vec({-1}), vec({1}), 0, 5), ModelError);
  EXPECT_THROW(DemandCurve::piecewise({0, 1}, {vec({1}), vec({-1})}), ModelError);
}
