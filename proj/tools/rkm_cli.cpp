#include "rkm/cli.hpp"

int main(int argc, char **argv) { return rkm::cli::run_cli(argc, argv); }
