#include <iostream>

#include "epc/cli/commands.hpp"

int main(int argc, char** argv) { return epc::cli::run_cli(argc, argv, std::cout, std::cerr); }
