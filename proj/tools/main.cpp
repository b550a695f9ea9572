#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return cramerlab::cli::run(argc, argv, std::cout, std::cerr); }
