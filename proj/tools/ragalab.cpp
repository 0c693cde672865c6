#include <iostream>

#include "ragalab/cli.hpp"

int main(int argc, char** argv) { return ragalab::cli::run(argc, argv, std::cout, std::cerr); }
