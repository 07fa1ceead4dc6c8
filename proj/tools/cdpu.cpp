#include <iostream>

#include "cdpu/cli.hpp"

int main(int argc, char** argv) { return cdpu::cli_main(argc, argv, std::cout, std::cerr); }
