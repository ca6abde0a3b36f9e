#include "cli_app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return symh::run_cli(argc, argv, std::cout, std::cerr);
}
