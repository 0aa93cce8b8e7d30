#include <string>
#include <vector>

#include "qhyst/cli.hpp"

int main(int argc, char** argv) {
  return qhyst::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
