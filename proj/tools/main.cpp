#include <iostream>

#include "lobvol/cli.hpp"

int main(int argc, char** argv) { return lobvol::cli_dispatch(argc, argv, std::cout, std::cerr); }
