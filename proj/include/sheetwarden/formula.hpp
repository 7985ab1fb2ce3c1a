#pragma once

#include "sheetwarden/address.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sheetwarden {

/// Reference as written in a formula. An empty sheet means "the host cell's sheet".
struct CellRef {
    std::string sheet;
    int col = 1;
    int row = 1;

    CellAddress resolve(const std::string& host_sheet) const {
        return {sheet.empty() ? host_sheet : sheet, col, row};
    }

    friend bool operator==(const CellRef&, const CellRef&) = default;
};

enum class UnaryOp { Plus, Minus };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Eq, Ne, Lt, Le, Gt, Ge };
enum class Function { Sum, Count, Average, Min, Max, If };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberNode {
    double value = 0;  // finite and non-negative; negation is a UnaryNode
};
struct TextNode {
    std::string value;
};
struct RefNode {
    CellRef ref;
};
/// Rectangular same-sheet range; `first` is the top-left corner.
struct RangeNode {
    CellRef first;
    CellRef last;
};
struct UnaryNode {
    UnaryOp op;
    ExprPtr operand;
};
struct BinaryNode {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct CallNode {
    Function fn;
    std::vector<ExprPtr> args;
};

struct Expr {
    std::variant<NumberNode, TextNode, RefNode, RangeNode, UnaryNode, BinaryNode, CallNode> node;
};

/// Deep structural equality.
bool operator==(const Expr& a, const Expr& b);
bool same_ast(const ExprPtr& a, const ExprPtr& b);

ExprPtr make_number(double v);
ExprPtr make_text(std::string s);
ExprPtr make_ref(CellRef r);
/// Normalizes the corners so the first is top-left. Throws std::invalid_argument across sheets.
ExprPtr make_range(CellRef a, CellRef b);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
/// Throws std::invalid_argument on an arity violation (IF takes 3, the rest at least 1).
ExprPtr make_call(Function fn, std::vector<ExprPtr> args);

class FormulaSyntaxError : public std::runtime_error {
public:
    FormulaSyntaxError(std::size_t position, const std::string& what)
        : std::runtime_error(what), position_(position) {}

    /// 0-based offset into the formula source.
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses a formula beginning with '='.
ExprPtr parse_formula(std::string_view source);

/// Prints with the leading '=' and the minimum parentheses needed to re-parse to the same tree.
std::string print_formula(const Expr& e);
std::string print_expr(const Expr& e);

/// Prints refs through `format_ref(ref, is_range_tail)`; used for relative "shape" strings.
using RefFormatter = std::function<std::string(const CellRef&, bool)>;
std::string print_expr(const Expr& e, const RefFormatter& format_ref);

std::string_view to_string(BinaryOp op);
std::string_view to_string(Function fn);

bool is_arithmetic(BinaryOp op);

/// Calls `fn(const CellRef&)` for every reference, range corners included.
template <class F>
void for_each_ref(const Expr& e, F&& fn);

/// Every ref in the tree, ranges expanded to their corners only.
std::vector<CellRef> direct_refs(const Expr& e);

/// Rebuilds the tree with every CellRef passed through `map`.
template <class F>
ExprPtr map_refs(const ExprPtr& e, F&& map);

// ---------------------------------------------------------------------------

template <class F>
void for_each_ref(const Expr& e, F&& fn) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, RefNode>) {
                fn(n.ref);
            } else if constexpr (std::is_same_v<N, RangeNode>) {
                fn(n.first);
                fn(n.last);
            } else if constexpr (std::is_same_v<N, UnaryNode>) {
                for_each_ref(*n.operand, fn);
            } else if constexpr (std::is_same_v<N, BinaryNode>) {
                for_each_ref(*n.lhs, fn);
                for_each_ref(*n.rhs, fn);
            } else if constexpr (std::is_same_v<N, CallNode>) {
                for (const auto& a : n.args) for_each_ref(*a, fn);
            }
        },
        e.node);
}

template <class F>
ExprPtr map_refs(const ExprPtr& e, F&& map) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, RefNode>) {
                return make_ref(map(n.ref));
            } else if constexpr (std::is_same_v<N, RangeNode>) {
                return make_range(map(n.first), map(n.last));
            } else if constexpr (std::is_same_v<N, UnaryNode>) {
                return make_unary(n.op, map_refs(n.operand, map));
            } else if constexpr (std::is_same_v<N, BinaryNode>) {
                return make_binary(n.op, map_refs(n.lhs, map), map_refs(n.rhs, map));
            } else if constexpr (std::is_same_v<N, CallNode>) {
                std::vector<ExprPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(map_refs(a, map));
                return make_call(n.fn, std::move(args));
            } else {
                return e;
            }
        },
        e->node);
}

}  // namespace sheetwarden
