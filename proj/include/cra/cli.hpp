#pragma once

#include <string>
#include <vector>

namespace cra {

struct CommandResult {
    int exit_code = 0;  // 0 holds/success, 1 refuted with witness, 2 inconclusive, 3 usage
    std::string out;
    std::string err;
};

// Full command dispatch (everything the `cra` binary does), callable
// in-process.  argv excludes the program name.
CommandResult run_command(const std::vector<std::string>& argv);

}  // namespace cra
