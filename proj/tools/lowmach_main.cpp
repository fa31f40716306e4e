#include "lowmach/cli.hpp"

int main(int argc, char** argv) { return lowmach::cli_main(argc, argv); }
