#include "iforge/cli.hpp"

int main(int argc, char** argv) { return iforge::run_cli(argc, argv); }
