#include <iostream>

#include "hybreg/cli.hpp"

int main(int argc, char** argv) { return hybreg::cli::run_cli(argc, argv, std::cout, std::cerr); }
