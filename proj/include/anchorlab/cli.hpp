#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace anchorlab {

// Runs one front-end command (value | anchor | repeat | breaker | verify |
// decay) against the supplied argument list.  Human-readable output goes to
// `out`, diagnostics to `err`, machine-readable artifacts to the --out path.
// Returns the process exit code: 0 on success, 1 when a requested check
// found violations, 2 on input or parse errors.
int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// argv wrapper around cli_run for the binary entry point.
int cli_main(int argc, char** argv);

} // namespace anchorlab
