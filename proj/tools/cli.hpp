#pragma once

#include <ostream>

namespace tfm::cli {

// Exit codes: 0 success, 1 data error, 2 usage or configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfm::cli
