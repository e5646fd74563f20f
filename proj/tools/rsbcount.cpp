#include "rsb/cli.hpp"

int main(int argc, char** argv) { return rsb::cli_run(argc, argv); }
