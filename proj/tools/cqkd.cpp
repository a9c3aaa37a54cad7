#include "cqkd/cli.hpp"

int main(int argc, char** argv) { return cqkd::cli::run(argc, argv); }
