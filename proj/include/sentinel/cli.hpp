#pragma once

#include <ostream>

namespace sentinel {

/// Exit codes: 0 success, 1 input error, 2 numerical failure, 3 a verify
/// suite found a violated inequality.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sentinel
