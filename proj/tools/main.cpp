#include <string>
#include <vector>

#include "veroweb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return veroweb::cli_run(args);
}
