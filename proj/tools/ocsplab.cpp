#include "ocsp/cli.hpp"

int main(int argc, char** argv) { return ocsp::cli_run(argc, argv); }
