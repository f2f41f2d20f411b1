#include "pcvx3/cli.hpp"

int main(int argc, char** argv) { return pcvx3::cli::main_entry(argc, argv); }
