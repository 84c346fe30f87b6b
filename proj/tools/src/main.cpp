#include <iostream>
#include <string>
#include <vector>

#include "asdep_app/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return asdep::app::run(args, std::cout, std::cerr);
}
