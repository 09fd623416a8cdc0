#include <iostream>

#include "app/run.hpp"

int main(int argc, char** argv) { return exinf::app::cli_main(argc, argv, std::cout, std::cerr); }
