#include "mfvol/cli.hpp"

int main(int argc, char** argv) { return mfvol::cli::run(argc, argv); }
