#include "sheetwarden/evaluate.hpp"

#include <cmath>
#include <deque>

namespace sheetwarden {

namespace {

struct Blank {};
using Operand = std::variant<Blank, double, std::string, bool, ErrorCode>;
using Number = std::variant<double, ErrorCode>;

Number to_number(const Operand& v) {
    if (std::holds_alternative<Blank>(v)) return 0.0;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
    return ErrorCode::Value;
}

Operand checked(double v) {
    if (!std::isfinite(v)) return ErrorCode::Value;
    return v;
}

class Interpreter {
public:
    Interpreter(const Workbook& wb, const ValueMap& values) : wb_(wb), values_(values) {}

    Value run(const Expr& e, const std::string& host) {
        host_ = &host;
        return std::visit(
            [](auto&& v) -> Value {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, Blank>) return 0.0;
                else return v;
            },
            eval(e));
    }

private:
    Operand lookup(const CellAddress& addr) const {
        if (!wb_.find_sheet(addr.sheet)) return ErrorCode::Ref;
        auto it = values_.find(addr);
        if (it == values_.end()) return Blank{};
        return std::visit([](const auto& v) -> Operand { return v; }, it->second);
    }

    Operand eval(const Expr& e) {
        return std::visit([&](const auto& n) -> Operand { return eval_node(n); }, e.node);
    }

    Operand eval_node(const NumberNode& n) { return n.value; }
    Operand eval_node(const TextNode& n) { return n.value; }
    Operand eval_node(const RefNode& n) { return lookup(n.ref.resolve(*host_)); }
    Operand eval_node(const RangeNode&) { return ErrorCode::Value; }

    Operand eval_node(const UnaryNode& n) {
        const auto x = to_number(eval(*n.operand));
        if (const auto* err = std::get_if<ErrorCode>(&x)) return *err;
        const double d = std::get<double>(x);
        return n.op == UnaryOp::Minus ? -d : d;
    }

    Operand eval_node(const BinaryNode& n) {
        auto lhs = eval(*n.lhs);
        if (const auto* err = std::get_if<ErrorCode>(&lhs)) return *err;
        auto rhs = eval(*n.rhs);
        if (const auto* err = std::get_if<ErrorCode>(&rhs)) return *err;
        if (is_arithmetic(n.op)) return arithmetic(n.op, lhs, rhs);
        return compare(n.op, std::move(lhs), std::move(rhs));
    }

    static Operand arithmetic(BinaryOp op, const Operand& lhs, const Operand& rhs) {
        const auto a = to_number(lhs);
        if (const auto* err = std::get_if<ErrorCode>(&a)) return *err;
        const auto b = to_number(rhs);
        if (const auto* err = std::get_if<ErrorCode>(&b)) return *err;
        const double x = std::get<double>(a);
        const double y = std::get<double>(b);
        switch (op) {
            case BinaryOp::Add: return checked(x + y);
            case BinaryOp::Sub: return checked(x - y);
            case BinaryOp::Mul: return checked(x * y);
            case BinaryOp::Div:
                if (y == 0) return ErrorCode::DivZero;
                return checked(x / y);
            case BinaryOp::Pow:
                if (x == 0 && y < 0) return ErrorCode::DivZero;
                return checked(std::pow(x, y));
            default: return ErrorCode::Value;
        }
    }

    static Operand compare(BinaryOp op, Operand lhs, Operand rhs) {
        // A blank takes the zero value of the other side's type.
        auto adapt = [](Operand& blank, const Operand& other) {
            if (!std::holds_alternative<Blank>(blank)) return;
            if (std::holds_alternative<std::string>(other)) blank = std::string();
            else if (std::holds_alternative<bool>(other)) blank = false;
            else blank = 0.0;
        };
        adapt(lhs, rhs);
        adapt(rhs, lhs);
        if (lhs.index() != rhs.index()) return ErrorCode::Value;
        int c = 0;
        if (const auto* x = std::get_if<double>(&lhs)) {
            const double y = std::get<double>(rhs);
            c = *x < y ? -1 : (*x > y ? 1 : 0);
        } else if (const auto* s = std::get_if<std::string>(&lhs)) {
            const int r = s->compare(std::get<std::string>(rhs));
            c = r < 0 ? -1 : (r > 0 ? 1 : 0);
        } else {
            c = static_cast<int>(std::get<bool>(lhs)) - static_cast<int>(std::get<bool>(rhs));
        }
        switch (op) {
            case BinaryOp::Eq: return c == 0;
            case BinaryOp::Ne: return c != 0;
            case BinaryOp::Lt: return c < 0;
            case BinaryOp::Le: return c <= 0;
            case BinaryOp::Gt: return c > 0;
            case BinaryOp::Ge: return c >= 0;
            default: return ErrorCode::Value;
        }
    }

    struct Tally {
        double sum = 0;
        double min = 0;
        double max = 0;
        std::size_t count = 0;
        std::optional<ErrorCode> error;

        void add(double v) {
            min = count ? std::min(min, v) : v;
            max = count ? std::max(max, v) : v;
            sum += v;
            ++count;
        }
    };

    // Referenced cells contribute numbers only; text, booleans and blanks are skipped.
    void tally_cell(const Operand& v, Tally& t) {
        if (const auto* err = std::get_if<ErrorCode>(&v)) t.error = *err;
        else if (const auto* d = std::get_if<double>(&v)) t.add(*d);
    }

    void tally_range(const CellRef& first, const CellRef& last, Tally& t) {
        const auto sheet_name = first.resolve(*host_).sheet;
        const auto* sheet = wb_.find_sheet(sheet_name);
        if (!sheet) {
            t.error = ErrorCode::Ref;
            return;
        }
        for (int r = first.row; r <= last.row && !t.error; ++r) {
            auto it = sheet->cells.lower_bound(GridPos{r, first.col});
            for (; it != sheet->cells.end() && it->first.row == r && it->first.col <= last.col && !t.error; ++it)
                tally_cell(lookup(CellAddress{sheet_name, it->first.col, r}), t);
        }
    }

    Operand eval_node(const CallNode& n) {
        if (n.fn == Function::If) {
            const auto cond = eval(*n.args[0]);
            if (const auto* err = std::get_if<ErrorCode>(&cond)) return *err;
            if (std::holds_alternative<std::string>(cond)) return ErrorCode::Value;
            const auto truth = to_number(cond);
            return eval(*n.args[std::get<double>(truth) != 0 ? 1 : 2]);
        }

        Tally t;
        for (const auto& arg : n.args) {
            if (const auto* range = std::get_if<RangeNode>(&arg->node)) {
                tally_range(range->first, range->last, t);
            } else if (const auto* ref = std::get_if<RefNode>(&arg->node)) {
                tally_cell(lookup(ref->ref.resolve(*host_)), t);
            } else {
                const auto v = to_number(eval(*arg));
                if (const auto* err = std::get_if<ErrorCode>(&v)) t.error = *err;
                else t.add(std::get<double>(v));
            }
            if (t.error) return *t.error;
        }
        switch (n.fn) {
            case Function::Sum: return checked(t.sum);
            case Function::Count: return static_cast<double>(t.count);
            case Function::Average:
                if (t.count == 0) return ErrorCode::DivZero;
                return checked(t.sum / static_cast<double>(t.count));
            case Function::Min: return t.min;
            case Function::Max: return t.max;
            default: return ErrorCode::Value;
        }
    }

    const Workbook& wb_;
    const ValueMap& values_;
    const std::string* host_ = nullptr;
};

}  // namespace

ValueMap evaluate(const Workbook& wb) { return evaluate(wb, build_dependency_graph(wb)); }

ValueMap evaluate(const Workbook& wb, const DependencyGraph& graph) {
    ValueMap values;
    std::map<CellAddress, const Formula*> formulas;
    for_each_cell(wb, [&](const CellAddress& addr, const Cell& cell) {
        if (const auto* d = std::get_if<double>(&cell.content)) values.emplace(addr, *d);
        else if (const auto* s = std::get_if<std::string>(&cell.content)) values.emplace(addr, *s);
        else if (const auto* f = cell.formula()) {
            if (graph.cycle_set.count(addr)) values.emplace(addr, ErrorCode::Cycle);
            else formulas.emplace(addr, f);
        }
    });

    // Kahn's algorithm over the acyclic formula cells.
    std::map<CellAddress, std::size_t> pending;
    std::deque<CellAddress> ready;
    for (const auto& [addr, _] : formulas) {
        std::size_t n = 0;
        if (auto it = graph.precedents.find(addr); it != graph.precedents.end())
            for (const auto& p : it->second) n += formulas.count(p);
        if (n == 0) ready.push_back(addr);
        else pending[addr] = n;
    }

    Interpreter interp(wb, values);
    while (!ready.empty()) {
        const auto addr = ready.front();
        ready.pop_front();
        values.insert_or_assign(addr, interp.run(*formulas.at(addr)->ast, addr.sheet));
        if (auto it = graph.dependents.find(addr); it != graph.dependents.end()) {
            for (const auto& d : it->second) {
                auto p = pending.find(d);
                if (p != pending.end() && --p->second == 0) {
                    pending.erase(p);
                    ready.push_back(d);
                }
            }
        }
    }
    return values;
}

}  // namespace sheetwarden
