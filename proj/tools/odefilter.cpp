#include <iostream>
#include <string>
#include <vector>

#include "odefilter/experiments.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return odefilter::run_cli(args, std::cout, std::cerr);
}
