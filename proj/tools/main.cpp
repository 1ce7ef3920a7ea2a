#include "cli_app.hpp"

int main(int argc, char** argv) { return ed::cli::run_cli(argc, argv); }
