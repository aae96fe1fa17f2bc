#include <iostream>

#include "maxcucl/cli.hpp"

int main(int argc, char** argv) { return maxcucl::run_cli(argc, argv, std::cout, std::cerr); }
