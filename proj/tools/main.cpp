#include <iostream>

#include "waxsim/harness.hpp"

int main(int argc, char** argv) {
  return waxsim::cli_main(argc, argv, std::cout, std::cerr);
}
