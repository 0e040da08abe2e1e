#include <iostream>
#include <string>
#include <vector>

#include "rsrlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rsrlab::run_command(args, std::cout, std::cerr);
}
