#include <iostream>
#include <string>
#include <vector>

#include "orbitlens/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return orbitlens::run_cli(args, std::cout, std::cerr);
}
