#ifndef QDF_CLI_HPP
#define QDF_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace qdf::cli {

/// Runs the qdf command line: args are the arguments after the program
/// name. Returns the process exit status: 0 success / no findings,
/// 1 findings (validation errors, decode mismatches, fmt rewrites),
/// 2 operational failure (I/O, fatal parse, usage). Never throws.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace qdf::cli

#endif
