#include "rumin/cli.hpp"

int main(int argc, char** argv) { return rumin::cli::run(argc, argv); }
