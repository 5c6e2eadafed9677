#include "cli/cli.hpp"

int main(int argc, char** argv) { return hlmax::cli::main(argc, argv); }
