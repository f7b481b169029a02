#pragma once

#include <ostream>

namespace taxoforge::cli {

/// Entry point of the `taxoforge` tool. Exit codes: 0 success, 1 data or
/// validation failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace taxoforge::cli
