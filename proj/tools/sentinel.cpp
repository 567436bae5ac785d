#include "sentinel/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sentinel::cli_main(argc, argv, std::cout, std::cerr); }
