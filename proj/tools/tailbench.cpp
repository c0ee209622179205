#include "tailbench/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return tailbench::run_cli(argc, argv, std::cout, std::cerr);
}
