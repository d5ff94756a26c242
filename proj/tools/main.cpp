#include "kmissing/cli.hpp"

int main(int argc, char** argv) { return kmissing::run_cli(argc, argv); }
