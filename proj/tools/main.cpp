#include <iostream>
#include <string>
#include <vector>

#include "tensor_spectra/cli.hpp"

int main(int argc, char** argv) {
  return tensor_spectra::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
