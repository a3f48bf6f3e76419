#include <iostream>

#include "bot_cli.hpp"

int main(int argc, char** argv) { return bot::cli::run(argc, argv, std::cout, std::cerr); }
