#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace multiwell::cli {

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
/// Returns the process exit code: 0 ok, 1 analysis failure, 2 bad usage or config.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace multiwell::cli
