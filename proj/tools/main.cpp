#include "cli.hpp"

int main(int argc, char** argv) { return newspulse::cli::run(argc, argv); }
