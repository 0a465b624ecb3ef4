#include <iostream>

#include "cdb/cli.hpp"

int main(int argc, char** argv) { return cdb::cli::run(argc, argv, std::cout, std::cerr); }
