#include "specops/cli.hpp"

int main(int argc, char** argv) { return specops::cli::run_cli(argc, argv); }
