#include "restex/cli.hpp"

int main(int argc, char** argv) { return restex::run_cli(argc, argv); }
