#include <iostream>

#include "shiftscope/cli.hpp"

int main(int argc, char** argv) { return shiftscope::cli::run(argc, argv, std::cout, std::cerr); }
