#include "slesim/cli.hpp"

int main(int argc, char** argv) { return sle::run_cli(argc, argv); }
