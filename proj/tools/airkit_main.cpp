#include <iostream>

#include "airkit/cli.hpp"

int main(int argc, char** argv) { return airkit::cli::run(argc, argv, std::cout, std::cerr); }
