#include <iostream>
#include <string>
#include <vector>

#include "gna/cli.hpp"
#include "gna/tensor.hpp"

int main(int argc, char** argv) {
  gna::retain_freed_memory();
  const std::vector<std::string> args(argv + 1, argv + argc);
  return gna::run_command(args, std::cout, std::cerr);
}
