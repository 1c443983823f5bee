#include <iostream>
#include <string>
#include <vector>

#include "dualsrc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dualsrc::run_cli(args, std::cout, std::cerr);
}
