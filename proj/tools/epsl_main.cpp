#include <iostream>

#include "epsl/cli.hpp"

int main(int argc, char** argv) { return epsl::run_cli(argc, argv, std::cout, std::cerr); }
