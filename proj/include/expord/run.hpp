#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace expord {

enum class Policy { Strict, Relaxed };

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIndeterminate = 3;

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<uint64_t> seed;
  Policy policy = Policy::Strict;
  std::ostream* log = nullptr;  // progress lines; null silences them
};

/// Execute one scenario command (check | simulate | verify | attractor),
/// writing deterministic artifacts named <stem>.<command>.<claim>.{json,csv}
/// into the output directory. Returns the exit status contract:
/// 0 all-pass, 1 any fail verdict, 2 usage/parse error, 3 indeterminate
/// within the scan windows.
int run_scenario(const std::filesystem::path& scenario_path,
                 const std::string& command, const RunOptions& opts = {});

}  // namespace expord
