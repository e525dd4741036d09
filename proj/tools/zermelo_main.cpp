#include <iostream>

#include "zermelo/cli.hpp"

int main(int argc, char **argv) {
  return zermelo::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
