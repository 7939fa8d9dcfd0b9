#include <iostream>

#include "gsmat/cli.hpp"

int main(int argc, char** argv) { return gsmat::run_cli(argc, argv, std::cout, std::cerr); }
