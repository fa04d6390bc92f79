#ifndef RAPA_CLI_HPP
#define RAPA_CLI_HPP

#include <iosfwd>

namespace rapa::cli {

/// Parses argv and runs one subcommand. Results go to files named by --out
/// (or `out`), diagnostics to `err`. Returns the process exit status.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rapa::cli

#endif  // RAPA_CLI_HPP
