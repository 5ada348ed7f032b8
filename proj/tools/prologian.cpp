#include <iostream>

#include "prologian/cli/commands.hpp"

int main(int argc, char** argv) { return prologian::cli::run(argc, argv, std::cout, std::cerr); }
