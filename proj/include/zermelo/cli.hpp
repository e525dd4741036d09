#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zermelo::cli {

/// Runs one command line (without the program name). Primary output goes to
/// `out` unless an output directory is given; failures print one JSON object
/// on `err`. Returns 0, or 1 (domain), 2 (numerical), 3 (bad input).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace zermelo::cli
