#include "fermigauss/cli.hpp"

int main(int argc, char** argv) { return fermigauss::cli::run(argc, argv); }
