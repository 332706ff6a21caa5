#include <iostream>

#include "wkappa/cli.hpp"

int main(int argc, char** argv) {
  return wkappa::run_cli(argc, argv, std::cout, std::cerr);
}
