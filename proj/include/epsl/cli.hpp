#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace epsl {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "EPSL_OUT_DIR";

std::filesystem::path default_out_dir();

/// Entry point of the `epsl` command. Returns the process exit code:
/// 0 on success, 2 for usage errors, 1 for failures while running.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with the arguments after the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epsl
