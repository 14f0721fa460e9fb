#include "minsum/harness.hpp"

int main(int argc, char** argv) { return minsum::run_cli(argc, argv); }
