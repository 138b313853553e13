#include "kgnr/cli.hpp"

int main(int argc, char** argv) { return kgnr::run_cli(argc, argv); }
