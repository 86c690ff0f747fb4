#include <iostream>

#include "posebench/cli.hpp"

int main(int argc, char** argv) { return posebench::run_cli(argc, argv, std::cout, std::cerr); }
