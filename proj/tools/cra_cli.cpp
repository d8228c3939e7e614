#include <cstdio>
#include <iostream>

#include "cra/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    cra::CommandResult r = cra::run_command(args);
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}
