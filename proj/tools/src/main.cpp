#include <iostream>

#include "hmmc/cli.hpp"

int main(int argc, char** argv) {
  return hmmc::cli::dispatch(argc, argv, std::cout, std::cerr);
}
