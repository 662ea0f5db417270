#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csm::cli {

/// Entry point shared by the `csm` binary and the tests. Exit codes:
/// 0 success, 1 semantic failure (invalid system, mismatching diff, cap
/// exceeded), 2 usage or I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace csm::cli
