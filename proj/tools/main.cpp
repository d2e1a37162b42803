#include <iostream>

#include <nilcurv/cli.hpp>

int main(int argc, char** argv) {
  return nilcurv::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
