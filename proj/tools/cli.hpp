#pragma once

#include <iosfwd>

namespace lqb::cli {

/// Entry point of the `liouville` tool. Returns 0 on success, 2 on argument
/// errors and 1 on numerical failures (after writing partial output).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lqb::cli
