#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mgc {

/// Entry point of the `mgc` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on runtime errors, 2 on usage errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgc
