#include "cli.hpp"

int main(int argc, char** argv) { return optohmf::cli::run(argc, argv); }
