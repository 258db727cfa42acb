#include <iostream>
#include <string>
#include <vector>

#include "dysonlab/runner.hpp"

int main(int argc, char** argv) {
  return dysonlab::cli_main(std::vector<std::string>(argv + 1, argv + argc),
                            std::cout, std::cerr);
}
