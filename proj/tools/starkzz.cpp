#include <iostream>
#include <string>
#include <vector>

#include "starkzz/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return starkzz::cli::run(args, std::cout, std::cerr);
}
