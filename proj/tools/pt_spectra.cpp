#include <iostream>

#include "ptspectra/cli.hpp"

int main(int argc, char** argv) { return ptspectra::cli::run(argc, argv, std::cout, std::cerr); }
