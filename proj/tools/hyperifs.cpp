#include <iostream>
#include <string>
#include <vector>

#include "hyperifs/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hyperifs::cli::run(args, std::cout, std::cerr);
}
