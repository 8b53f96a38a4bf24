#include <string>
#include <vector>

#include "sparselab/cli.hpp"

int main(int argc, char** argv) { return sparselab::runSubcommand(std::vector<std::string>(argv + 1, argv + argc)); }
