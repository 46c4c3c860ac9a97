#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace staplegrid::cli {

// 0 success, 1 operational error, 2 usage error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace staplegrid::cli
