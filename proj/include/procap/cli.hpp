#pragma once

#include <string>
#include <vector>

namespace procap::cli {

// Entry point behind main(). Exit codes: 0 success, 1 runtime failure,
// 2 usage error. Failures print a single "error: ..." line on stderr.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args); // args exclude the program name

} // namespace procap::cli
