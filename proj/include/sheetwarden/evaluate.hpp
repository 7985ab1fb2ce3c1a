#pragma once

#include "sheetwarden/address.hpp"
#include "sheetwarden/graph.hpp"
#include "sheetwarden/value.hpp"
#include "sheetwarden/workbook.hpp"

#include <map>

namespace sheetwarden {

using ValueMap = std::map<CellAddress, Value>;

/// Values for every non-empty cell. Acyclic formulas are computed in topological order;
/// cells on cycles yield #CYCLE!. Empty and undeclared cells read as 0 (or "" against text).
ValueMap evaluate(const Workbook& wb);
ValueMap evaluate(const Workbook& wb, const DependencyGraph& graph);

}  // namespace sheetwarden
