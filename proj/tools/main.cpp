#include "cmg/cli.hpp"

int main(int argc, char** argv) { return cmg::run_cli(argc, argv); }
