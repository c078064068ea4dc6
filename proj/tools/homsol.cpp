#include "homsol/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return homsol::cli::run(argc, argv, std::cout, std::cerr); }
