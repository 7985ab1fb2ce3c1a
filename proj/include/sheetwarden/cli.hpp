#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sheetwarden::cli {

/// 0 success, 1 findings at or above the configured --fail-on severity, 2 usage or I/O error.
struct CommandOutcome {
    int exit_code = 0;
    std::vector<std::filesystem::path> artifacts;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kConfigEnv = "SHEETWARDEN_CONFIG";

/// `args` excludes the program name. Findings, listings and tables go to `out`; summaries and
/// diagnostics go to `err`.
CommandOutcome run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sheetwarden::cli
