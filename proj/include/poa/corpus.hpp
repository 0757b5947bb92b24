#pragma once

#include <string>
#include <vector>

#include "poa/io.hpp"

namespace poa {

// Names accepted by example_instance.
std::vector<std::string> example_names();

// Instance JSON for a built-in example. `eps` is the weight of the vertical
// edge in "contraction-expansion" and ignored elsewhere. Throws ParseError
// for unknown names.
Json example_instance(const std::string& name, double eps = 1.0);

}  // namespace poa
