#include <iostream>

#include "cks/cli.hpp"

int main(int argc, char** argv) { return cks::cli::run(argc, argv, std::cout, std::cerr); }
