#include <iostream>

#include "tetra/cli/commands.hpp"

int main(int argc, char** argv) { return tetra::cli::run_cli(argc, argv, std::cout, std::cerr); }
