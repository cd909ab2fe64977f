#include <ergotac/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
  ergotac::tune_allocator();
  return ergotac::run_cli(argc, argv, std::cout, std::cerr);
}
