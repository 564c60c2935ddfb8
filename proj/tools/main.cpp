#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return radner::cli::run(argc, argv, std::cout, std::cerr); }
