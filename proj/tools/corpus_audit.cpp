#include "audit/cli.hpp"

int main(int argc, char** argv) { return audit::cli::run(argc, argv); }
