#include <iostream>
#include <string>
#include <vector>

#include "meanbounds/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv + 1, argv + argc);
    return meanbounds::cli::run(args, std::cout, std::cerr);
}
