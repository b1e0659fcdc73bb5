#include "dicelab/cli.hpp"

int main(int argc, char** argv) { return dicelab::cli::run(argc, argv); }
