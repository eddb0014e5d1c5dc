#include <iostream>

#include "toda/cli.hpp"

int main(int argc, char** argv) { return toda::cli::run(argc, argv, std::cout, std::cerr); }
