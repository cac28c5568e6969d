#include <iostream>

#include "trawl/cli.hpp"

int main(int argc, char** argv) { return trawl::run_cli(argc, argv, std::cout, std::cerr); }
