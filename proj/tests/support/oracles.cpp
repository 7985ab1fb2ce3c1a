#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <optional>

namespace oracle {

namespace {

void collect(const Expr& e, const std::string& host, std::set<CellAddress>& out) {
    if (const auto* r = std::get_if<RefNode>(&e.node)) {
        out.insert({r->ref.sheet.empty() ? host : r->ref.sheet, r->ref.col, r->ref.row});
    } else if (const auto* g = std::get_if<RangeNode>(&e.node)) {
        const auto& sheet = g->first.sheet.empty() ? host : g->first.sheet;
        for (int row = g->first.row; row <= g->last.row; ++row) {
            for (int col = g->first.col; col <= g->last.col; ++col) out.insert({sheet, col, row});
        }
    } else if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
        collect(*u->operand, host, out);
    } else if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
        collect(*b->lhs, host, out);
        collect(*b->rhs, host, out);
    } else if (const auto* c = std::get_if<CallNode>(&e.node)) {
        for (const auto& a : c->args) collect(*a, host, out);
    }
}

const Formula* formula_at(const Workbook& wb, const CellAddress& a) {
    const auto* cell = wb.find_cell(a);
    return cell ? std::get_if<Formula>(&cell->content) : nullptr;
}

}  // namespace

std::set<CellAddress> reads(const Expr& e, const std::string& host) {
    std::set<CellAddress> out;
    collect(e, host, out);
    return out;
}

std::set<CellAddress> cycle_cells(const Workbook& wb) {
    std::set<CellAddress> out;
    for (const auto& sheet : wb.sheets) {
        for (const auto& [pos, cell] : sheet.cells) {
            const CellAddress start{sheet.name, pos.col, pos.row};
            if (!formula_at(wb, start)) continue;
            std::set<CellAddress> visited;
            std::vector<CellAddress> stack{start};
            bool loops = false;
            while (!stack.empty() && !loops) {
                const auto at = stack.back();
                stack.pop_back();
                const auto* f = formula_at(wb, at);
                if (!f) continue;
                for (const auto& next : reads(*f->ast, at.sheet)) {
                    if (next == start) loops = true;
                    if (visited.insert(next).second) stack.push_back(next);
                }
            }
            if (loops) out.insert(start);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Blank {};
using V = std::variant<Blank, double, std::string, bool, ErrorCode>;

bool is_err(const V& v) { return std::holds_alternative<ErrorCode>(v); }

/// Numeric coercion: blank 0, bool 0/1, text #VALUE!.
std::optional<double> as_number(const V& v) {
    if (std::holds_alternative<Blank>(v)) return 0.0;
    if (auto d = std::get_if<double>(&v)) return *d;
    if (auto b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    return std::nullopt;
}

V finite_or_value(double d) { return std::isfinite(d) ? V{d} : V{ErrorCode::Value}; }

struct Naive {
    const Workbook& wb;
    std::set<CellAddress> on_cycle;
    std::map<CellAddress, V> memo;
    std::set<CellAddress> visiting;

    V cell(const CellAddress& a) {
        if (!wb.find_sheet(a.sheet)) return ErrorCode::Ref;
        const auto* c = wb.find_cell(a);
        if (!c) return Blank{};
        if (auto d = std::get_if<double>(&c->content)) return *d;
        if (auto s = std::get_if<std::string>(&c->content)) return *s;
        const auto* f = std::get_if<Formula>(&c->content);
        if (!f) return Blank{};
        if (on_cycle.count(a)) return ErrorCode::Cycle;
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        if (!visiting.insert(a).second) return ErrorCode::Cycle;  // unreachable when on_cycle is right
        V v = expr(*f->ast, a.sheet);
        visiting.erase(a);
        if (std::holds_alternative<Blank>(v)) v = 0.0;
        memo[a] = v;
        return v;
    }

    V expr(const Expr& e, const std::string& host) {
        if (auto n = std::get_if<NumberNode>(&e.node)) return n->value;
        if (auto t = std::get_if<TextNode>(&e.node)) return t->value;
        if (auto r = std::get_if<RefNode>(&e.node)) return cell({r->ref.sheet.empty() ? host : r->ref.sheet, r->ref.col, r->ref.row});
        if (std::holds_alternative<RangeNode>(e.node)) return ErrorCode::Value;
        if (auto u = std::get_if<UnaryNode>(&e.node)) {
            V x = expr(*u->operand, host);
            if (is_err(x)) return x;
            auto d = as_number(x);
            if (!d) return ErrorCode::Value;
            return u->op == UnaryOp::Minus ? -*d : *d;
        }
        if (auto b = std::get_if<BinaryNode>(&e.node)) return binary(*b, host);
        return call(std::get<CallNode>(e.node), host);
    }

    V binary(const BinaryNode& b, const std::string& host) {
        V l = expr(*b.lhs, host);
        if (is_err(l)) return l;
        V r = expr(*b.rhs, host);
        if (is_err(r)) return r;
        switch (b.op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div:
            case BinaryOp::Pow: {
                auto x = as_number(l), y = as_number(r);
                if (!x || !y) return ErrorCode::Value;
                if (b.op == BinaryOp::Add) return finite_or_value(*x + *y);
                if (b.op == BinaryOp::Sub) return finite_or_value(*x - *y);
                if (b.op == BinaryOp::Mul) return finite_or_value(*x * *y);
                if (b.op == BinaryOp::Div) return *y == 0 ? V{ErrorCode::DivZero} : finite_or_value(*x / *y);
                if (*x == 0 && *y < 0) return ErrorCode::DivZero;
                return finite_or_value(std::pow(*x, *y));
            }
            default: break;
        }
        // Comparison: a blank stands for the empty value of the other operand's type.
        auto fill = [](V& side, const V& other) {
            if (!std::holds_alternative<Blank>(side)) return;
            if (std::holds_alternative<std::string>(other)) side = std::string{};
            else if (std::holds_alternative<bool>(other)) side = false;
            else side = 0.0;
        };
        fill(l, r);
        fill(r, l);
        int order;
        if (std::holds_alternative<double>(l) && std::holds_alternative<double>(r)) {
            double x = std::get<double>(l), y = std::get<double>(r);
            order = (x > y) - (x < y);
        } else if (std::holds_alternative<std::string>(l) && std::holds_alternative<std::string>(r)) {
            int c = std::get<std::string>(l).compare(std::get<std::string>(r));
            order = (c > 0) - (c < 0);
        } else if (std::holds_alternative<bool>(l) && std::holds_alternative<bool>(r)) {
            order = int(std::get<bool>(l)) - int(std::get<bool>(r));
        } else {
            return ErrorCode::Value;
        }
        switch (b.op) {
            case BinaryOp::Eq: return order == 0;
            case BinaryOp::Ne: return order != 0;
            case BinaryOp::Lt: return order < 0;
            case BinaryOp::Le: return order <= 0;
            case BinaryOp::Gt: return order > 0;
            default: return order >= 0;
        }
    }

    V call(const CallNode& c, const std::string& host) {
        if (c.fn == Function::If) {
            V cond = expr(*c.args[0], host);
            if (is_err(cond)) return cond;
            if (std::holds_alternative<std::string>(cond)) return ErrorCode::Value;
            return expr(*c.args[*as_number(cond) != 0 ? 1 : 2], host);
        }
        std::vector<double> nums;
        for (const auto& arg : c.args) {
            std::vector<V> cells;
            if (auto g = std::get_if<RangeNode>(&arg->node)) {
                const auto& sheet = g->first.sheet.empty() ? host : g->first.sheet;
                if (!wb.find_sheet(sheet)) return ErrorCode::Ref;
                for (int row = g->first.row; row <= g->last.row; ++row)
                    for (int col = g->first.col; col <= g->last.col; ++col) cells.push_back(cell({sheet, col, row}));
            } else if (auto r = std::get_if<RefNode>(&arg->node)) {
                cells.push_back(cell({r->ref.sheet.empty() ? host : r->ref.sheet, r->ref.col, r->ref.row}));
            } else {
                V v = expr(*arg, host);
                if (is_err(v)) return v;
                auto d = as_number(v);
                if (!d) return ErrorCode::Value;
                nums.push_back(*d);
                continue;
            }
            // Referenced cells: the first error wins, only numbers count.
            for (const auto& v : cells) {
                if (is_err(v)) return v;
                if (auto d = std::get_if<double>(&v)) nums.push_back(*d);
            }
        }
        double sum = 0;
        for (double d : nums) sum += d;
        switch (c.fn) {
            case Function::Sum: return finite_or_value(sum);
            case Function::Count: return double(nums.size());
            case Function::Average: return nums.empty() ? V{ErrorCode::DivZero} : finite_or_value(sum / double(nums.size()));
            case Function::Min: return nums.empty() ? 0.0 : *std::min_element(nums.begin(), nums.end());
            case Function::Max: return nums.empty() ? 0.0 : *std::max_element(nums.begin(), nums.end());
            default: return ErrorCode::Value;
        }
    }
};

}  // namespace

std::map<CellAddress, Value> evaluate(const Workbook& wb) {
    Naive n{wb, cycle_cells(wb), {}, {}};
    std::map<CellAddress, Value> out;
    for (const auto& sheet : wb.sheets) {
        for (const auto& [pos, c] : sheet.cells) {
            if (std::holds_alternative<std::monostate>(c.content)) continue;
            const CellAddress a{sheet.name, pos.col, pos.row};
            V v = n.cell(a);
            out[a] = std::visit(
                [](const auto& x) -> Value {
                    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Blank>) return 0.0;
                    else return x;
                },
                v);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string random_text(Rng& rng, std::size_t max_len) {
    static const std::string pool = "abcXYZ 019\"'\\!#:;,{}[]=+-*/<>";
    std::string s;
    const auto len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        if (rng.bernoulli(0.05)) s += "\xc3\xa9";  // e-acute
        else s += pool[rng.below(pool.size())];
    }
    return s;
}

namespace {

CellRef random_ref(Rng& rng, int rows, int cols, int sheets) {
    CellRef r;
    const auto pick = rng.below(10);
    if (pick == 0) r.sheet = "Nope";
    else if (pick == 1 && sheets > 1) r.sheet = "S" + std::to_string(rng.between(1, sheets));
    r.col = rng.between(1, cols);
    r.row = rng.between(1, rows);
    return r;
}

ExprPtr random_expr(Rng& rng, int rows, int cols, int depth, int sheets) {
    if (depth <= 1 || rng.bernoulli(0.3)) {
        switch (rng.below(6)) {
            case 0: return make_number(static_cast<double>(rng.between(0, 4)));
            case 1: return make_number(static_cast<double>(rng.between(0, 40)) / 8.0);
            case 2: return make_text(rng.bernoulli(0.5) ? "" : "t" + std::to_string(rng.below(3)));
            default: return make_ref(random_ref(rng, rows, cols, sheets));
        }
    }
    switch (rng.below(4)) {
        case 0: return make_unary(rng.bernoulli(0.7) ? UnaryOp::Minus : UnaryOp::Plus, random_expr(rng, rows, cols, depth - 1, sheets));
        case 1:
        case 2: {
            const auto op = static_cast<BinaryOp>(rng.below(11));
            return make_binary(op, random_expr(rng, rows, cols, depth - 1, sheets), random_expr(rng, rows, cols, depth - 1, sheets));
        }
        default: {
            const auto fn = static_cast<Function>(rng.below(6));
            std::vector<ExprPtr> args;
            const int n = fn == Function::If ? 3 : rng.between(1, 3);
            for (int i = 0; i < n; ++i) {
                if (fn != Function::If && rng.bernoulli(0.4)) {
                    auto a = random_ref(rng, rows, cols, sheets);
                    auto b = random_ref(rng, rows, cols, sheets);
                    b.sheet = a.sheet;
                    args.push_back(make_range(a, b));
                } else {
                    args.push_back(random_expr(rng, rows, cols, depth - 1, sheets));
                }
            }
            return make_call(fn, std::move(args));
        }
    }
}

}  // namespace

Workbook random_grid(Rng& rng, int rows, int cols, int depth, int sheets) {
    Workbook wb;
    wb.name = "grid";
    const int n_sheets = rng.between(1, sheets);
    for (int s = 1; s <= n_sheets; ++s) {
        Sheet sheet{"S" + std::to_string(s), {}, {}, {}};
        const int r_max = rng.between(1, rows), c_max = rng.between(1, cols);
        for (int r = 1; r <= r_max; ++r) {
            for (int c = 1; c <= c_max; ++c) {
                Cell cell;
                switch (rng.below(8)) {
                    case 0:
                    case 1: continue;
                    case 2:
                    case 3: cell.content = static_cast<double>(rng.between(-3, 9)); break;
                    case 4: cell.content = std::string(rng.bernoulli(0.5) ? "" : "t1"); break;
                    default: {
                        auto ast = random_expr(rng, rows, cols, depth, sheets);
                        cell.content = Formula{print_formula(*ast), ast};
                    }
                }
                sheet.cells[GridPos{r, c}] = std::move(cell);
            }
        }
        wb.sheets.push_back(std::move(sheet));
    }
    return wb;
}

acl::Message random_message(Rng& rng, std::uint32_t max_hops) {
    using namespace acl;
    Message m;
    m.id = rng.next() >> rng.below(64);
    m.conversation = rng.next() >> rng.below(64);
    m.sender = static_cast<AgentId>(rng.next());
    m.receiver = static_cast<AgentId>(rng.below(50));
    m.performative = static_cast<Performative>(rng.below(6));
    m.hop = static_cast<std::uint32_t>(rng.below(max_hops + 1));
    auto maybe_text = [&]() -> std::optional<std::string> {
        if (rng.bernoulli(0.3)) return std::nullopt;
        return random_text(rng);
    };
    switch (m.performative) {
        case Performative::Query: m.payload = QueryKey{random_text(rng)}; break;
        case Performative::Inform: m.payload = Answer{random_text(rng), maybe_text()}; break;
        case Performative::Request:
        case Performative::Delegate: m.payload = TaskAssignment{rng.next(), random_text(rng, 30)}; break;
        case Performative::Ack: m.payload = Empty{}; break;
        case Performative::Report: {
            // Scores mix integers, dyadic fractions and arbitrary doubles.
            double score;
            switch (rng.below(3)) {
                case 0: score = static_cast<double>(rng.below(100)); break;
                case 1: score = static_cast<double>(rng.below(1000)) / 8.0; break;
                default: score = rng.uniform() * 1e6; break;
            }
            m.payload = AuditSummary{random_text(rng, 20), rng.next(), rng.below(500), random_text(rng, 8), score};
            break;
        }
    }
    return m;
}

}  // namespace oracle
