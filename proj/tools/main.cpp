#include "trajfid/cli.hpp"

int main(int argc, char** argv) { return trajfid::run_cli(argc, argv); }
