#pragma once

#include <ostream>

namespace bilt::app {

/// Entry point shared by the executable and the tests.  Returns the process
/// exit code: 0 success, 1 error, 2 rejection under --exit-on-reject.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bilt::app
