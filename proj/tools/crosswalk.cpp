#include "crosswalk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return crosswalk::run_cli(argc, argv, std::cout, std::cerr); }
