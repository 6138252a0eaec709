#include "symchi/cli.hpp"

int main(int argc, char** argv) { return symchi::run_cli(argc, argv); }
