#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fiberscope {

/// Entry point of the fiberscope command line, without the program name in `args`.
///
///   fiberscope <tile-check|analyze|decompose|transform|beta|report> --config PATH
///              [--out DIR] [--seed U64] [--json] [--csv]
///
/// Returns 0 when every verdict is true, 2 when some verdict is false and 1 on any error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fiberscope
