#include "depfdr/cli.hpp"

int main(int argc, char** argv) { return depfdr::cli::run(argc, argv); }
