#include <iostream>
#include <string>
#include <vector>

#include "vcs/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return vcs::cli::run(args, std::cout, std::cerr);
}
