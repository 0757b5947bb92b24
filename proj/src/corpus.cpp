#include "poa/corpus.hpp"

#include "poa/error.hpp"

namespace poa {
namespace {

Json affine(double a, double b) { return {{"type", "affine"}, {"a", a}, {"b", b}}; }

Json piecewise(double x0, std::vector<double> left, std::vector<double> right) {
  return {{"type", "piecewise"}, {"x0", x0}, {"left", left}, {"right", right}};
}

Json edge(const char* id, const char* tail, const char* head, Json cost) {
  return {{"id", id}, {"tail", tail}, {"head", head}, {"cost", std::move(cost)}};
}

Json single_od(const char* origin, const char* destination,
               std::vector<std::vector<std::string>> paths) {
  return Json::array({{{"id", "od"},
                       {"origin", origin},
                       {"destination", destination},
                       {"paths", paths}}});
}

Json unit_linear() { return {{"type", "linear"}, {"rates", {1.0}}}; }

// Downward parabola to x = 1, then a steeper upward one; C^1 at 1.
Json kinked(double right_scale) {
  return piecewise(1.0, {0.0, 2.0, -1.0},
                   {1.0 + right_scale, -2.0 * right_scale, right_scale});
}

Json fig1() {
  return {{"name", "fig1"},
          {"vertices", {"O", "v1", "v2", "D"}},
          {"edges",
           {edge("e1", "O", "v1", affine(1.0 / 3.0, 0.0)),
            edge("e2", "O", "v2", affine(0.0, 1.0)),
            edge("e3", "v1", "v2", affine(0.0, 0.0)),
            edge("e4", "v1", "D", affine(0.0, 1.0)),
            edge("e5", "v2", "D", affine(1.0, 0.0)),
            edge("e6", "O", "D", affine(1.0, 2.5)),
            edge("e7", "O", "D", affine(0.5, 4.0))}},
          {"commodities",
           single_od("O", "D", {{"e1", "e4"}, {"e2", "e5"}, {"e1", "e3", "e5"}, {"e6"}, {"e7"}})},
          {"demand", unit_linear()}};
}

Json twolink() {
  return {{"name", "twolink"},
          {"vertices", {"O", "D"}},
          {"edges", {edge("e1", "O", "D", kinked(1.0)), edge("e2", "O", "D", kinked(2.0))}},
          {"commodities", single_od("O", "D", {{"e1"}, {"e2"}})},
          {"demand", unit_linear()}};
}

Json wheatstone() {
  return {{"name", "wheatstone"},
          {"vertices", {"O", "v1", "v2", "D"}},
          {"edges",
           {edge("e1", "O", "v1", affine(1.0, 0.0)),
            edge("e2", "O", "v2", affine(1.0, 0.0)),
            edge("e3", "v1", "D", piecewise(1.0, {0.9, 0.2, -0.1}, {11.0, -20.0, 10.0})),
            edge("e4", "v2", "D", kinked(1.0)),
            edge("e5", "v1", "v2", {{"type", "poly"}, {"coeffs", {0.0, 0.0, 1.0}}})}},
          {"commodities", single_od("O", "D", {{"e1", "e3"}, {"e2", "e4"}, {"e1", "e5", "e4"}})},
          {"demand", unit_linear()}};
}

Json fisk() {
  return {{"name", "fisk"},
          {"vertices", {"a", "b", "c"}},
          {"edges",
           {edge("ab", "a", "b", affine(1.0, 0.0)),
            edge("ac", "a", "c", affine(1.0, 90.0)),
            edge("bc", "b", "c", affine(1.0, 0.0))}},
          {"commodities",
           {{{"id", "ab"}, {"origin", "a"}, {"destination", "b"}, {"paths", {{"ab"}}}},
            {{"id", "ac"}, {"origin", "a"}, {"destination", "c"},
             {"paths", {{"ac"}, {"ab", "bc"}}}},
            {{"id", "bc"}, {"origin", "b"}, {"destination", "c"}, {"paths", {{"bc"}}}}}},
          {"demand", {{"type", "affine"}, {"slope", {0.0, 1.0, 0.0}}, {"intercept", {1.0, 0.0, 100.0}}}}};
}

Json contraction_expansion(double eps) {
  return {{"name", "contraction-expansion"},
          {"vertices", {"O", "v1", "v2", "D"}},
          {"edges",
           {edge("e1", "O", "v1", affine(1.0, 0.0)),
            edge("e2", "O", "v2", affine(0.0, 1.0)),
            edge("e3", "v1", "v2", affine(eps, 0.0)),
            edge("e4", "v1", "D", affine(0.0, 1.0)),
            edge("e5", "v2", "D", affine(1.0, 0.0)),
            edge("e6", "O", "D", affine(1.0, 2.0))}},
          {"commodities",
           single_od("O", "D", {{"e1", "e4"}, {"e2", "e5"}, {"e1", "e3", "e5"}, {"e6"}})},
          {"demand", unit_linear()}};
}

Json watling_equality() {
  return {{"name", "watling-equality"},
          {"vertices", {"O", "D"}},
          {"edges",
           {edge("e1", "O", "D", kinked(1.0)),
            edge("e2", "O", "D", {{"type", "poly"}, {"coeffs", {1.0, 0.0, 1.0}}})}},
          {"commodities", single_od("O", "D", {{"e1"}, {"e2"}})},
          {"demand", unit_linear()}};
}

}  // namespace

std::vector<std::string> example_names() {
  return {"fig1", "twolink", "wheatstone", "fisk", "contraction-expansion", "watling-equality"};
}

Json example_instance(const std::string& name, double eps) {
  if (name == "fig1") return fig1();
  if (name == "twolink") return twolink();
  if (name == "wheatstone") return wheatstone();
  if (name == "fisk") return fisk();
  if (name == "contraction-expansion") {
    if (!(eps > 0.0)) throw ParseError("contraction-expansion needs eps > 0");
    return contraction_expansion(eps);
  }
  if (name == "watling-equality") return watling_equality();
  throw ParseError("unknown example '" + name + "'");
}

}  // namespace poa
