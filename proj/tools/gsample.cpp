#include "gsample/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return gsample::cli::run_cli(argc, argv, std::cout, std::cerr);
}
