#include "cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return chorin::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
