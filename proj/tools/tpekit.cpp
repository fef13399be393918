#include <iostream>

#include "tpekit/cli/app.hpp"

int main(int argc, char** argv) {
  return tpekit::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
