#pragma once

namespace gpb {

// Command-line front end (subcommands: run, gamma, coverage, scenarios).
// Returns 0 on success, 2 on usage or configuration errors, 1 on internal
// failures.
int cli_main(int argc, char** argv);

}  // namespace gpb
