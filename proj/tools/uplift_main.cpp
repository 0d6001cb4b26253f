#include <iostream>

#include "uplift/cli.hpp"

int main(int argc, char** argv) { return uplift::main_entry(argc, argv, std::cout, std::cerr); }
