#include <iostream>

#include "lne/cli/app.hpp"

int main(int argc, char** argv) { return lne::cli::run(argc, argv, std::cout, std::cerr); }
