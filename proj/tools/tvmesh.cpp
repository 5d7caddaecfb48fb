#include "tvmesh/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tvmesh::cli::main(argc, argv, std::cout, std::cerr); }
