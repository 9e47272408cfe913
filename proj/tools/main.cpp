#include "gpb/cli.hpp"

int main(int argc, char** argv) { return gpb::cli_main(argc, argv); }
