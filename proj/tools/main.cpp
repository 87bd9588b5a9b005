#include "qsw/cli_config.hpp"

int main(int argc, char** argv) { return qsw::run_cli(argc, argv); }
