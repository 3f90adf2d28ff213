#include <iostream>

#include "coop/cli.hpp"

int main(int argc, char** argv) { return coop::cli::run_cli(argc, argv, std::cout, std::cerr); }
