#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cskit::cli {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Runs one `cskit` invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cskit::cli
