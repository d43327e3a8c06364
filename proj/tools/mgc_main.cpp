#include <iostream>
#include <string>
#include <vector>

#include "mgc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mgc::cli_main(args, std::cout, std::cerr);
}
