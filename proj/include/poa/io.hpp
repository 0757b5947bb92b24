#pragma once

#include <json.hpp>
#include <string>

#include "poa/equilibrium.hpp"
#include "poa/fixed_regime.hpp"
#include "poa/model.hpp"
#include "poa/sensitivity.hpp"

namespace poa {

using Json = nlohmann::ordered_json;

struct Instance {
  std::string name;
  Game game;
  DemandCurve demand;
  double extension_slope = kDefaultExtensionSlope;
  std::size_t path_cap = kDefaultPathCap;
};

// Builds an instance from its JSON form. Paths given as bare edge lists get
// ids p1, p2, ... in column order; "auto" enumerates all simple paths.
// Commodities sharing a path are rewired through dummy origins. Throws
// ParseError naming the offending field, ModelError for invalid content.
Instance parse_instance(const Json& doc);

// Reads and parses a file; JSON syntax errors report line and column.
Instance load_instance(const std::string& path);

// Solver options with the instance's extension slope applied.
SolverOptions options_for(const Instance& inst, SolverOptions base = {});

CostFunction parse_cost(const Json& j, const std::string& where = "cost");
Json cost_to_json(const CostFunction& c);

Json equilibrium_to_json(const Game& game, const EquilibriumResult& res);
Json poa_to_json(const Game& game, const PoaResult& res);
Json relaxed_to_json(const Game& game, const RelaxedSolution& sol,
                     const WardropConsistency& consistency);
Json breakpoint_to_json(const Game& game, const BreakpointReport& rep);

}  // namespace poa
