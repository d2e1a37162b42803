#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nilcurv::cli {

/// Runs one command line (without the program name). Returns 0 when the
/// computation succeeded and every verified property passed (or was refuted
/// as expected), 1 when a property failed, 2 on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nilcurv::cli
