#include "lapf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lapf::cli::main(argc, argv, std::cin, std::cout, std::cerr); }
