#include "levyctl/cli.hpp"

int main(int argc, char** argv) { return levyctl::cli::run(argc, argv); }
