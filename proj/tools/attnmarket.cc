#include <iostream>
#include <string>
#include <vector>

#include "attn/cli/app.h"

int main(int argc, char** argv) {
  return attn::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
