#include "twinbeam/cli.hpp"

int main(int argc, char** argv) { return twinbeam::cli::run(argc, argv); }
