#include "cli_app.hpp"

int main(int argc, char** argv) { return frackit::cli::run(argc, argv); }
