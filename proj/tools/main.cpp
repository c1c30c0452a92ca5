#include "aecrit/cli_app.hpp"

int main(int argc, char** argv) { return aecrit::cli::run(argc, argv); }
