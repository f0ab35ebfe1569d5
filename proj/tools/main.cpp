#include "cli/cli.hpp"

int main(int argc, char** argv) { return photonbench::cli::run_cli(argc, argv); }
