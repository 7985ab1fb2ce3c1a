#pragma once

#include "sheetwarden/address.hpp"
#include "sheetwarden/workbook.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace sheetwarden {

/// Precedent -> dependent edges between cell addresses.
struct DependencyGraph {
    std::set<CellAddress> nodes;
    std::map<CellAddress, std::set<CellAddress>> dependents;
    std::map<CellAddress, std::set<CellAddress>> precedents;
    /// Nodes lying on at least one directed cycle (self-loops included).
    std::set<CellAddress> cycle_set;

    std::size_t edge_count() const;
    bool has_edge(const CellAddress& precedent, const CellAddress& dependent) const;
    std::vector<std::pair<CellAddress, CellAddress>> edges() const;
};

/// Every address a formula on `host_sheet` reads, with ranges expanded cell by cell.
std::set<CellAddress> referenced_addresses(const Expr& e, const std::string& host_sheet);

DependencyGraph build_dependency_graph(const Workbook& wb);

/// Strongly connected components of size > 1 plus self-looping nodes.
std::set<CellAddress> find_cycle_nodes(const std::set<CellAddress>& nodes,
                                       const std::map<CellAddress, std::set<CellAddress>>& out_edges);

}  // namespace sheetwarden
