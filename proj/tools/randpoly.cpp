#include <iostream>

#include "randpoly/cli.hpp"

int main(int argc, char** argv) { return randpoly::cli::dispatch(argc, argv, std::cout, std::cerr); }
