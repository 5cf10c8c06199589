#include <iostream>

#include "mcdm/cli.hpp"

int main(int argc, char** argv) { return mcdm::run_cli(argc, argv, std::cout, std::cerr); }
