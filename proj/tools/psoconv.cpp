#include <iostream>

#include "psoconv/cli.hpp"

int main(int argc, char** argv) { return psoconv::run_cli(argc, argv, std::cout, std::cerr); }
