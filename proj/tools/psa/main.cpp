#include "commands.hpp"

int main(int argc, char** argv) { return psa::cli::run_cli(argc, argv); }
