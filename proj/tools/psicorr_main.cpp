#include "psi/cli.hpp"

int main(int argc, char** argv) { return psi::run_cli(argc, argv); }
