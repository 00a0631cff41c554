#include "anchorlab/cli.hpp"

int main(int argc, char** argv) { return anchorlab::cli_main(argc, argv); }
