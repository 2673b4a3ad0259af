#include "cracc/cli.hpp"

int main(int argc, char** argv) { return cracc::run_cli(argc, argv); }
