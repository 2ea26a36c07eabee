#include <iostream>
#include <string>
#include <vector>

#include "localmap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return localmap::run_cli(args, std::cout, std::cerr);
}
