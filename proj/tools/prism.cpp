#include <iostream>

#include "prism/cli.hpp"

int main(int argc, char** argv) { return prism::runCli(argc, argv, std::cout, std::cerr); }
