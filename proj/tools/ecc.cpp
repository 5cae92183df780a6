#include <iostream>

#include "ecc/cli.hpp"

int main(int argc, char** argv) { return ecc::cli::dispatch(argc, argv, std::cout, std::cerr); }
