#include "pulseforge/cli.hpp"

int main(int argc, char** argv) { return pulseforge::run_cli(argc, argv); }
