#include "fast/cli.hpp"

int main(int argc, char** argv) { return fast::cli::run(argc, argv); }
