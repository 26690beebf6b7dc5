#include <iostream>

#include "eegart/cli.hpp"

int main(int argc, char** argv) {
  return eegart::cli::run(argc, argv, std::cout, std::cerr);
}
