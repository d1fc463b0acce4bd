#include <iostream>
#include <string>
#include <vector>

#include "trine/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trine::run_main(args, std::cout, std::cerr);
}
