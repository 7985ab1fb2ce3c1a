#include "sheetwarden/value.hpp"

#include "sheetwarden/keyvalue.hpp"

#include <algorithm>
#include <cmath>

namespace sheetwarden {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DivZero: return "#DIV/0!";
        case ErrorCode::Cycle: return "#CYCLE!";
        case ErrorCode::Ref: return "#REF!";
        case ErrorCode::Value: return "#VALUE!";
    }
    return "#VALUE!";
}

std::string to_display(const Value& v) {
    struct {
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
        std::string operator()(ErrorCode e) const { return std::string(to_string(e)); }
    } visitor;
    return std::visit(visitor, v);
}

bool values_close(const Value& a, const Value& b, double rel_tol) {
    if (a.index() != b.index()) return false;
    if (const auto* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        if (*x == y) return true;
        return std::fabs(*x - y) <= rel_tol * std::max(std::fabs(*x), std::fabs(y));
    }
    return a == b;
}

}  // namespace sheetwarden
