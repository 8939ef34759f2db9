#include <iostream>
#include <string>
#include <vector>

#include "lllsample/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lllsample::dispatch(args, std::cout, std::cerr);
}
