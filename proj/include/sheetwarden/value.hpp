#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace sheetwarden {

enum class ErrorCode { DivZero, Cycle, Ref, Value };

std::string_view to_string(ErrorCode code);

/// Result of evaluating a cell: number, text, boolean or an in-band error.
using Value = std::variant<double, std::string, bool, ErrorCode>;

std::string to_display(const Value& v);

/// Numbers compare with relative tolerance `rel_tol`; everything else exactly.
bool values_close(const Value& a, const Value& b, double rel_tol = 1e-12);

}  // namespace sheetwarden
