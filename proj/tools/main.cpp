#include "tsdistill/cli.hpp"

int main(int argc, char** argv) { return tsdistill::run_cli(argc, argv); }
