#include <string>
#include <vector>

#include "affgd/cli.hpp"

int main(int argc, char** argv) {
  return affgd::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
