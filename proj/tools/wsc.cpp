#include <wsc/cli.hpp>

int main(int argc, char **argv) { return wsc::cli::run(argc, argv); }
