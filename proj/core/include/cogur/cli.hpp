#pragma once

#include <string>
#include <vector>

namespace cogur {

/// Subcommand dispatch: run, eig, bvp, check-kernel, check-nonlinearity,
/// study, limit.  Returns the process exit status: 0 success, 1 validation
/// or configuration rejection, 2 numerical failure, 64 usage errors.
/// COGUR_OUT overrides the configured output directory.
int dispatch(const std::vector<std::string>& args);

}  // namespace cogur
