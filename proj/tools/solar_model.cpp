#include <iostream>

#include "solar/cli.hpp"

int main(int argc, char** argv) { return solar::cli::run(argc, argv, std::cout, std::cerr); }
