#include <kuramoto3/cli.hpp>

int main(int argc, char** argv) { return kuramoto3::cli::run_command(argc, argv); }
