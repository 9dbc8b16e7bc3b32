#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fierisk::cli {

/// Exit codes: 0 success, 1 unexpected failure, 2 usage error, 10 + ErrorKind for library errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fierisk::cli
