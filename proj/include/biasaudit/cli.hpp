#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biasaudit {

// Full command-line entry point; `main` is a thin wrapper around this so the
// test suites can drive the CLI in-process. Returns the process exit code:
// 0 success, 1 validation/usage error, 2 I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

} // namespace biasaudit
