#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return robust_pr::cli::run(argc, argv, std::cout, std::cerr); }
