#include <iostream>

#include "taxoforge/cli.hpp"

int main(int argc, char** argv) { return taxoforge::cli::run(argc, argv, std::cout, std::cerr); }
