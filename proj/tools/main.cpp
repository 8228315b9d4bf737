#include <iostream>

#include "fpflow/cli/commands.hpp"

int main(int argc, char** argv) {
  return fpflow::cli::main_entry(argc, argv, std::cout, std::cerr);
}
