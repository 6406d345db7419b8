#include <iostream>

#include "netgame/harness/cli.hpp"

int main(int argc, char** argv) {
  return netgame::harness::run_cli(argc, argv, std::cout, std::cerr);
}
