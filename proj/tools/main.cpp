#include <iostream>

#include "trilat/cli.hpp"

int main(int argc, char** argv) { return trilat::cli::run(argc, argv, std::cout, std::cerr); }
