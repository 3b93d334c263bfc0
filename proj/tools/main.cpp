#include "cli.hpp"

int main(int argc, char** argv) { return rerank::run_cli(argc, argv); }
