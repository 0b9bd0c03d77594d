#include <iostream>

#include "tropf/io/cli.hpp"

int main(int argc, char** argv) { return tropf::io::cli_main(argc, argv, std::cout, std::cerr); }
