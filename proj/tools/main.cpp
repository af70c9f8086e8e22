#include "gasket/cli.hpp"

int main(int argc, char** argv) { return gasket::cli::main(argc, argv); }
