#include <iostream>

#include "aerochan/cli.hpp"

int main(int argc, char** argv) { return aerochan::run_cli(argc, argv, std::cout, std::cerr); }
