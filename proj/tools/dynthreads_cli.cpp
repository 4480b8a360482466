#include <iostream>

#include "dynthreads/cli.hpp"

int main(int argc, char** argv) {
  return dynthreads::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
