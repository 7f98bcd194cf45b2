#include "d2dcache/experiment.hpp"

int main(int argc, char** argv) { return d2dcache::cli_main(argc, argv); }
