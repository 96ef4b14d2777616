#include "mibounds/cli.hpp"

int main(int argc, char** argv) { return mibounds::run_cli(argc, argv); }
