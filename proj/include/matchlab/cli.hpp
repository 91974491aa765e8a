#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matchlab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int malformed_input = 2;
inline constexpr int invalid_instance = 3;
inline constexpr int too_large = 4;
inline constexpr int invalid_config = 5;
inline constexpr int io_error = 6;
inline constexpr int internal_error = 70;
inline constexpr int usage = 64;
}  // namespace exit_code

/// Entry point of the `matchlab` executable. `args` excludes the program
/// name. Reports go to `out`, diagnostics and the resolved configuration to
/// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace matchlab
