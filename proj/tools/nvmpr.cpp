#include <iostream>

#include "nvmpr/cli.hpp"

int main(int argc, char** argv) { return nvmpr::run_cli(argc, argv, std::cout, std::cerr); }
