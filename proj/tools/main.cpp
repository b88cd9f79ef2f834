#include <iostream>

#include "hartree/cli/commands.hpp"

int main(int argc, char** argv) { return hartree::cli::run(argc, argv, std::cout, std::cerr); }
