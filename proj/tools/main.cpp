#include "dobgibbs/cli.hpp"

int main(int argc, char** argv) { return dobgibbs::run_cli(argc, argv); }
