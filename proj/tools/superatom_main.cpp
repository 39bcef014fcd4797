#include "superatom/cli.hpp"

int main(int argc, char** argv) { return superatom::cli::main(argc, argv); }
