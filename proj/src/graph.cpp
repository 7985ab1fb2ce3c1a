#include "sheetwarden/graph.hpp"

#include <algorithm>
#include <iterator>

namespace sheetwarden {

std::size_t DependencyGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& [_, ds] : dependents) n += ds.size();
    return n;
}

bool DependencyGraph::has_edge(const CellAddress& precedent, const CellAddress& dependent) const {
    auto it = dependents.find(precedent);
    return it != dependents.end() && it->second.count(dependent) > 0;
}

std::vector<std::pair<CellAddress, CellAddress>> DependencyGraph::edges() const {
    std::vector<std::pair<CellAddress, CellAddress>> out;
    for (const auto& [p, ds] : dependents)
        for (const auto& d : ds) out.emplace_back(p, d);
    return out;
}

std::set<CellAddress> referenced_addresses(const Expr& e, const std::string& host_sheet) {
    std::set<CellAddress> out;
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, RefNode>) {
                out.insert(n.ref.resolve(host_sheet));
            } else if constexpr (std::is_same_v<N, RangeNode>) {
                const auto sheet = n.first.resolve(host_sheet).sheet;
                for (int r = n.first.row; r <= n.last.row; ++r)
                    for (int c = n.first.col; c <= n.last.col; ++c) out.insert(CellAddress{sheet, c, r});
            } else if constexpr (std::is_same_v<N, UnaryNode>) {
                out.merge(referenced_addresses(*n.operand, host_sheet));
            } else if constexpr (std::is_same_v<N, BinaryNode>) {
                out.merge(referenced_addresses(*n.lhs, host_sheet));
                out.merge(referenced_addresses(*n.rhs, host_sheet));
            } else if constexpr (std::is_same_v<N, CallNode>) {
                for (const auto& a : n.args) out.merge(referenced_addresses(*a, host_sheet));
            }
        },
        e.node);
    return out;
}

std::set<CellAddress> find_cycle_nodes(const std::set<CellAddress>& nodes,
                                       const std::map<CellAddress, std::set<CellAddress>>& out_edges) {
    // Dense ids keep the walk off string comparisons.
    std::vector<const CellAddress*> addr;
    std::map<CellAddress, int> id_of;
    auto intern = [&](const CellAddress& a) {
        auto [it, fresh] = id_of.try_emplace(a, static_cast<int>(addr.size()));
        if (fresh) addr.push_back(&it->first);
        return it->second;
    };
    for (const auto& n : nodes) intern(n);
    for (const auto& [from, tos] : out_edges) {
        intern(from);
        for (const auto& to : tos) intern(to);
    }
    const auto n = static_cast<int>(addr.size());
    std::vector<std::vector<int>> succ(n);
    std::vector<char> self_loop(n, 0);
    for (const auto& [from, tos] : out_edges) {
        const int v = id_of.at(from);
        for (const auto& to : tos) {
            const int w = id_of.at(to);
            succ[v].push_back(w);
            if (v == w) self_loop[v] = 1;
        }
    }

    // Iterative Tarjan; recursion would overflow on long dependency chains.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::set<CellAddress> result;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t next;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        auto visit = [&](int v) {
            index[v] = low[v] = next_index++;
            stack.push_back(v);
            on_stack[v] = 1;
            call.push_back(Frame{v, 0});
        };
        visit(root);
        while (!call.empty()) {
            auto& frame = call.back();
            const int v = frame.node;
            if (frame.next < succ[v].size()) {
                const int w = succ[v][frame.next++];
                if (index[w] < 0) visit(w);
                else if (on_stack[w]) low[v] = std::min(low[v], index[w]);
                continue;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
            if (low[v] != index[v]) continue;
            const auto base = std::find(stack.rbegin(), stack.rend(), v).base() - 1;
            const bool cyclic = stack.end() - base > 1 || self_loop[v];
            for (auto it = base; it != stack.end(); ++it) {
                on_stack[*it] = 0;
                if (cyclic) result.insert(*addr[*it]);
            }
            stack.erase(base, stack.end());
        }
    }
    return result;
}

DependencyGraph build_dependency_graph(const Workbook& wb) {
    DependencyGraph g;
    for_each_cell(wb, [&](const CellAddress& addr, const Cell& cell) {
        g.nodes.insert(addr);
        const auto* f = cell.formula();
        if (!f) return;
        for (const auto& p : referenced_addresses(*f->ast, addr.sheet)) {
            g.nodes.insert(p);
            g.dependents[p].insert(addr);
            g.precedents[addr].insert(p);
        }
    });
    g.cycle_set = find_cycle_nodes(g.nodes, g.dependents);
    return g;
}

}  // namespace sheetwarden
