#include "specbound/cli.hpp"

int main(int argc, char** argv) { return specbound::cli::run(argc, argv); }
