#include "dpcpower/cli.hpp"

int main(int argc, char** argv) { return dpcpower::run_cli(argc, argv); }
