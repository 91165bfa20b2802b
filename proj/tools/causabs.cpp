#include <iostream>

#include "causabs/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return causabs::run_cli(args, std::cout, std::cerr);
}
