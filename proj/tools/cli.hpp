#pragma once

#include <iosfwd>

namespace wfshape::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kDataError = 2,
};

/// Entry point shared by the wfshape binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wfshape::cli
