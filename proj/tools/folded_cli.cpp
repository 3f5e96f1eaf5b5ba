#include "folded/cli.hpp"

int main(int argc, char** argv) { return folded::cli::run(argc, argv); }
