#include "peakload/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return peakload::run_cli(argc, argv, std::cout, std::cerr); }
