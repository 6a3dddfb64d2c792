#include "phasefield/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return phasefield::cli_main(argc, argv, std::cout, std::cerr); }
