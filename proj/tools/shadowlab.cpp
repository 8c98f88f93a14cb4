#include <iostream>

#include "shadowlab/cli.hpp"

int main(int argc, char** argv) { return shadowlab::run_cli(argc, argv, std::cout, std::cerr); }
