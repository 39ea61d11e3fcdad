#include <string>
#include <vector>

#include "atclab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return atclab::cli::run(args);
}
