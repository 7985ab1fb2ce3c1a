#include "sheetwarden/formula.hpp"

#include "sheetwarden/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace sheetwarden {

// ---------------------------------------------------------------------------
// Construction and equality

ExprPtr make_number(double v) { return std::make_shared<const Expr>(Expr{NumberNode{v}}); }
ExprPtr make_text(std::string s) { return std::make_shared<const Expr>(Expr{TextNode{std::move(s)}}); }
ExprPtr make_ref(CellRef r) { return std::make_shared<const Expr>(Expr{RefNode{std::move(r)}}); }

ExprPtr make_range(CellRef a, CellRef b) {
    if (a.sheet != b.sheet) throw std::invalid_argument("range corners on different sheets");
    CellRef first{a.sheet, std::min(a.col, b.col), std::min(a.row, b.row)};
    CellRef last{a.sheet, std::max(a.col, b.col), std::max(a.row, b.row)};
    return std::make_shared<const Expr>(Expr{RangeNode{std::move(first), std::move(last)}});
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
    return std::make_shared<const Expr>(Expr{UnaryNode{op, std::move(operand)}});
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{BinaryNode{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr make_call(Function fn, std::vector<ExprPtr> args) {
    if (fn == Function::If ? args.size() != 3 : args.empty())
        throw std::invalid_argument(std::string(to_string(fn)) + ": wrong number of arguments");
    return std::make_shared<const Expr>(Expr{CallNode{fn, std::move(args)}});
}

bool same_ast(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using N = std::decay_t<decltype(x)>;
            const auto& y = std::get<N>(b.node);
            if constexpr (std::is_same_v<N, NumberNode>) return x.value == y.value;
            else if constexpr (std::is_same_v<N, TextNode>) return x.value == y.value;
            else if constexpr (std::is_same_v<N, RefNode>) return x.ref == y.ref;
            else if constexpr (std::is_same_v<N, RangeNode>) return x.first == y.first && x.last == y.last;
            else if constexpr (std::is_same_v<N, UnaryNode>) return x.op == y.op && same_ast(x.operand, y.operand);
            else if constexpr (std::is_same_v<N, BinaryNode>)
                return x.op == y.op && same_ast(x.lhs, y.lhs) && same_ast(x.rhs, y.rhs);
            else {
                if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!same_ast(x.args[i], y.args[i])) return false;
                return true;
            }
        },
        a.node);
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

std::string_view to_string(Function fn) {
    switch (fn) {
        case Function::Sum: return "SUM";
        case Function::Count: return "COUNT";
        case Function::Average: return "AVERAGE";
        case Function::Min: return "MIN";
        case Function::Max: return "MAX";
        case Function::If: return "IF";
    }
    return "?";
}

bool is_arithmetic(BinaryOp op) {
    return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div ||
           op == BinaryOp::Pow;
}

std::vector<CellRef> direct_refs(const Expr& e) {
    std::vector<CellRef> out;
    for_each_ref(e, [&](const CellRef& r) { out.push_back(r); });
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

std::optional<Function> function_by_name(std::string_view name) {
    std::string upper;
    for (char c : name) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (upper == "SUM") return Function::Sum;
    if (upper == "COUNT") return Function::Count;
    if (upper == "AVERAGE") return Function::Average;
    if (upper == "MIN") return Function::Min;
    if (upper == "MAX") return Function::Max;
    if (upper == "IF") return Function::If;
    return std::nullopt;
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse() {
        if (src_.empty() || src_[0] != '=') fail(0, "formula must begin with '='");
        pos_ = 1;
        auto e = comparison();
        skip_ws();
        if (pos_ != src_.size()) fail(pos_, "unexpected '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& msg) {
        throw FormulaSyntaxError(at, "formula syntax error at " + std::to_string(at) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < src_.size() && src_[pos_] == ' ') ++pos_;
    }

    bool eat(std::string_view tok) {
        skip_ws();
        if (src_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr comparison() {
        auto lhs = additive();
        for (;;) {
            BinaryOp op;
            if (eat("<>")) op = BinaryOp::Ne;
            else if (eat("<=")) op = BinaryOp::Le;
            else if (eat(">=")) op = BinaryOp::Ge;
            else if (eat("<")) op = BinaryOp::Lt;
            else if (eat(">")) op = BinaryOp::Gt;
            else if (eat("=")) op = BinaryOp::Eq;
            else return lhs;
            lhs = make_binary(op, lhs, additive());
        }
    }

    ExprPtr additive() {
        auto lhs = term();
        for (;;) {
            if (eat("+")) lhs = make_binary(BinaryOp::Add, lhs, term());
            else if (eat("-")) lhs = make_binary(BinaryOp::Sub, lhs, term());
            else return lhs;
        }
    }

    ExprPtr term() {
        auto lhs = power();
        for (;;) {
            if (eat("*")) lhs = make_binary(BinaryOp::Mul, lhs, power());
            else if (eat("/")) lhs = make_binary(BinaryOp::Div, lhs, power());
            else return lhs;
        }
    }

    // Right-associative; a leading sign belongs to the base: -2^2 == (-2)^2.
    ExprPtr power() {
        auto base = unary();
        if (eat("^")) return make_binary(BinaryOp::Pow, base, power());
        return base;
    }

    ExprPtr unary() {
        if (eat("-")) return make_unary(UnaryOp::Minus, unary());
        if (eat("+")) return make_unary(UnaryOp::Plus, unary());
        return primary();
    }

    ExprPtr primary() {
        const char c = peek();
        const std::size_t start = pos_;
        if (c == '\0') fail(pos_, "unexpected end of formula");
        if (c == '(') {
            ++pos_;
            auto e = comparison();
            if (!eat(")")) fail(pos_, "expected ')'");
            return e;
        }
        if (c == '"') return make_text(quoted('"'));
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '\'') {
            auto sheet = quoted('\'');
            if (!eat("!")) fail(pos_, "expected '!' after sheet name");
            return reference(std::move(sheet), start);
        }
        if (!is_ident_char(c)) fail(pos_, "unexpected '" + std::string(1, c) + "'");

        const std::size_t ident_start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const auto ident = src_.substr(ident_start, pos_ - ident_start);
        if (pos_ < src_.size() && src_[pos_] == '(') {
            auto fn = function_by_name(ident);
            if (!fn) fail(ident_start, "unknown function '" + std::string(ident) + "'");
            ++pos_;
            std::vector<ExprPtr> args;
            if (!eat(")")) {
                do {
                    args.push_back(comparison());
                } while (eat(","));
                if (!eat(")")) fail(pos_, "expected ')' or ','");
            }
            try {
                return make_call(*fn, std::move(args));
            } catch (const std::invalid_argument& e) {
                fail(ident_start, e.what());
            }
        }
        if (pos_ < src_.size() && src_[pos_] == '!') {
            ++pos_;
            return reference(std::string(ident), start);
        }
        pos_ = ident_start;
        return reference("", start);
    }

    CellRef cell(const std::string& sheet) {
        const std::size_t at = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && is_ident_char(src_[pos_])) fail(at, "invalid cell reference");
        const auto p = parse_a1(src_.substr(at, pos_ - at));
        if (!p) fail(at, "invalid cell reference '" + std::string(src_.substr(at, pos_ - at)) + "'");
        return CellRef{sheet, p->col, p->row};
    }

    ExprPtr reference(std::string sheet, std::size_t start) {
        auto first = cell(sheet);
        if (pos_ < src_.size() && src_[pos_] == ':') {
            ++pos_;
            std::string second_sheet = sheet;
            // Optional repeated prefix on the second corner: Sheet!A1:Sheet!B2.
            const std::size_t save = pos_;
            if (pos_ < src_.size() && src_[pos_] == '\'') {
                second_sheet = quoted('\'');
                if (!eat("!")) fail(pos_, "expected '!' after sheet name");
            } else {
                while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
                if (pos_ < src_.size() && src_[pos_] == '!') {
                    second_sheet = std::string(src_.substr(save, pos_ - save));
                    ++pos_;
                } else {
                    pos_ = save;
                }
            }
            if (second_sheet != sheet) fail(start, "range spans two sheets");
            auto last = cell(sheet);
            return make_range(std::move(first), std::move(last));
        }
        return make_ref(std::move(first));
    }

    ExprPtr number() {
        const std::size_t at = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
                pos_ = p;
            }
        }
        const auto text = src_.substr(at, pos_ - at);
        double v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
            fail(at, "invalid number '" + std::string(text) + "'");
        if (pos_ < src_.size() && is_ident_char(src_[pos_])) fail(pos_, "invalid number");
        return make_number(v);
    }

    // Quoted token with the quote character doubled as its escape.
    std::string quoted(char q) {
        const std::size_t at = pos_;
        ++pos_;
        std::string out;
        for (;;) {
            if (pos_ >= src_.size()) fail(at, "unterminated quote");
            const char c = src_[pos_++];
            if (c == q) {
                if (pos_ < src_.size() && src_[pos_] == q) {
                    out.push_back(q);
                    ++pos_;
                    continue;
                }
                return out;
            }
            out.push_back(c);
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

enum Prec { kCompare = 1, kAdd = 2, kMul = 3, kPow = 4, kUnary = 5, kAtom = 6 };

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kMul;
        case BinaryOp::Pow: return kPow;
        default: return kCompare;
    }
}

int precedence(const Expr& e) {
    if (const auto* b = std::get_if<BinaryNode>(&e.node)) return precedence(b->op);
    if (std::holds_alternative<UnaryNode>(e.node)) return kUnary;
    return kAtom;
}

std::string quote(std::string_view s, char q) {
    std::string out(1, q);
    for (char c : s) {
        out.push_back(c);
        if (c == q) out.push_back(q);
    }
    out.push_back(q);
    return out;
}

std::string print_ref(const CellRef& r, bool with_sheet = true) {
    std::string out;
    if (with_sheet && !r.sheet.empty())
        out = (is_plain_sheet_name(r.sheet) ? r.sheet : quote(r.sheet, '\'')) + "!";
    return out + a1(r.col, r.row);
}

std::string default_ref(const CellRef& r, bool range_tail) { return print_ref(r, !range_tail); }

}  // namespace

ExprPtr parse_formula(std::string_view source) { return Parser(source).parse(); }

std::string print_expr(const Expr& e) { return print_expr(e, default_ref); }

std::string print_expr(const Expr& e, const RefFormatter& format_ref) {
    auto wrap = [&](const Expr& sub, bool parens) {
        auto s = print_expr(sub, format_ref);
        return parens ? "(" + s + ")" : s;
    };
    return std::visit(
        [&](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, NumberNode>) {
                return format_number(n.value);
            } else if constexpr (std::is_same_v<N, TextNode>) {
                return quote(n.value, '"');
            } else if constexpr (std::is_same_v<N, RefNode>) {
                return format_ref(n.ref, false);
            } else if constexpr (std::is_same_v<N, RangeNode>) {
                return format_ref(n.first, false) + ":" + format_ref(n.last, true);
            } else if constexpr (std::is_same_v<N, UnaryNode>) {
                return std::string(n.op == UnaryOp::Minus ? "-" : "+") +
                       wrap(*n.operand, precedence(*n.operand) < kUnary);
            } else if constexpr (std::is_same_v<N, BinaryNode>) {
                const int p = precedence(n.op);
                const int lp = precedence(*n.lhs);
                const int rp = precedence(*n.rhs);
                const bool right_assoc = n.op == BinaryOp::Pow;
                const bool lhs_parens = right_assoc ? lp <= p : lp < p;
                const bool rhs_parens = right_assoc ? rp < p : rp <= p;
                return wrap(*n.lhs, lhs_parens) + std::string(to_string(n.op)) + wrap(*n.rhs, rhs_parens);
            } else {
                std::string out(to_string(n.fn));
                out += "(";
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) out += ",";
                    out += print_expr(*n.args[i], format_ref);
                }
                return out + ")";
            }
        },
        e.node);
}

std::string print_formula(const Expr& e) { return "=" + print_expr(e); }

}  // namespace sheetwarden
