#include "normsol/cli_verify.hpp"

int main(int argc, char** argv) { return normsol::cli::run(argc, argv); }
