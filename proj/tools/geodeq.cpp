#include <iostream>

#include "geodeq/cli.hpp"

int main(int argc, char** argv) { return geodeq::cli::run(argc, argv, std::cout, std::cerr); }
