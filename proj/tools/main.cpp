#include "cli_app.hpp"

int main(int argc, char** argv) { return cropml::cli::run(argc, argv); }
