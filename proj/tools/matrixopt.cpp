#include <iostream>

#include "matrixopt/harness.hpp"

int main(int argc, char** argv) {
  return matrixopt::harness::run_cli(argc, argv, std::cout, std::cerr);
}
