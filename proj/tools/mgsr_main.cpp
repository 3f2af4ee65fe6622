#include <iostream>

#include "mgsr/cli.hpp"

int main(int argc, char** argv) { return mgsr::cli::run(argc, argv, std::cout, std::cerr); }
