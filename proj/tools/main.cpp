#include "mvd/cli.hpp"

int main(int argc, char** argv) { return mvd::run_cli(argc, argv); }
