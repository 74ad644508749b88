#include <iostream>

#include "sparse_lingam/cli.hpp"

int main(int argc, char** argv) {
  return sparse_lingam::run_cli(argc, argv, std::cout, std::cerr);
}
