#include <iostream>

#include "cbtail/cli.hpp"

int main(int argc, char** argv) { return cbtail::run_cli(argc, argv, std::cout, std::cerr); }
