#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return panelcast::cli::run_cli(argc, argv, std::cout, std::cerr); }
