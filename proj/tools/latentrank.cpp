#include <iostream>

#include "latentrank/app.hpp"

int main(int argc, char** argv) {
  return latentrank::run_cli(argc, argv, std::cout, std::cerr);
}
