#include "gamma_lab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gamma_lab::run_cli(argc, argv, std::cout, std::cerr); }
