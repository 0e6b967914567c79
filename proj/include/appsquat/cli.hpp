#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace appsquat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitPipeline = 2;

// Entry point behind the `appsquat` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace appsquat
