#include <iostream>

#include "avgkernel/cli.hpp"

int main(int argc, char** argv) { return avgkernel::cli::run(argc, argv, std::cout, std::cerr); }
