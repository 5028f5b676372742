#include <vector>

#include "cogur/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cogur::dispatch(args);
}
