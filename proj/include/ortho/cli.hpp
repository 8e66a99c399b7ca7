#pragma once
// Command line front end, callable in-process so tests can drive it with
// captured streams. Returns the process exit code:
//   0 success, 2 bad arguments, 3 failed verification or broken invariant,
//   4 search gave up on its node budget before settling the answer.

#include <iosfwd>
#include <string>
#include <vector>

namespace ortho::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ortho::cli
