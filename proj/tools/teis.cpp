#include <iostream>

#include "teis/cli.hpp"

int main(int argc, char** argv) { return teis::cli::run(argc, argv, std::cout, std::cerr); }
