#include "fosls/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return fosls::cli::main_entry(argc, argv, std::cout, std::cerr);
}
