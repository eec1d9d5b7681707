#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace phifam::cli {

// Runs one phifam invocation; args excludes the program name. Returns the
// exit code: 0 success, 1 usage or schema error, 2 domain error or failed
// check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// `phifam fixture <name>`: worked examples against their published values.
int run_fixture(const std::string& name, const RunConfig& cfg, std::ostream& out);

}  // namespace phifam::cli
