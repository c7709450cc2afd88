#include "cli.hpp"

int main(int argc, char** argv) { return qlab::cli::run_command({argv + 1, argv + argc}); }
