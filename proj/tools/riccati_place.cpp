#include "rplace/cli.hpp"

int main(int argc, char** argv) { return rplace::cli::main(argc, argv); }
