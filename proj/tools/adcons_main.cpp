#include <iostream>
#include <string>
#include <vector>

#include "adcons/cli.hpp"

int main(int argc, char** argv) {
  return adcons::run_command_line(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
