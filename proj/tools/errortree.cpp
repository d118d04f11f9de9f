#include <iostream>

#include "errortree/cli.hpp"

int main(int argc, char** argv) { return errortree::run_cli(argc, argv, std::cout, std::cerr); }
