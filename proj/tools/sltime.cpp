#include <iostream>

#include "sltime/cli.hpp"

int main(int argc, char** argv) { return sltime::run_cli(argc, argv, std::cout, std::cerr); }
