#include <iostream>
#include <string>
#include <vector>

#include "qrg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qrg::cli::run(args, std::cout, std::cerr);
}
