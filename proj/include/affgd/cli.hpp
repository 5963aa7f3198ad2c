#pragma once

#include <string>
#include <vector>

namespace affgd {

/// Entry point shared by the binary and the tests. args excludes argv[0].
/// Exit codes: 0 clean, 1 usage error, 2 divergence (run), 3 failed
/// inequality (verify).
int run_cli(const std::vector<std::string>& args);

}  // namespace affgd
