#include <iostream>

#include "girglab/cli/app.hpp"

int main(int argc, char** argv) { return girglab::cli::run(argc, argv, std::cout, std::cerr); }
