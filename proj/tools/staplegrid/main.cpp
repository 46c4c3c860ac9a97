#include <iostream>

#include "staplegrid/cli.hpp"

int main(int argc, char** argv) { return staplegrid::cli::run(argc, argv, std::cout, std::cerr); }
