#include "su0/cli.hpp"

int main(int argc, char** argv) { return su0::cli::run(argc, argv); }
