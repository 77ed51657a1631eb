#include <iostream>

#include "siac_cli.hpp"

int main(int argc, char **argv) { return siac::tool::run(argc, argv, std::cout, std::cerr); }
