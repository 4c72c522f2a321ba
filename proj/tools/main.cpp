#include "commands.hpp"

int main(int argc, char** argv) { return gitseg::cli::run(argc, argv); }
