#include <iostream>

#include "requ/cli.hpp"

int main(int argc, char** argv) {
  return requ::cli::run(argc, argv, std::cout, std::cerr);
}
