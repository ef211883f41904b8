#include "cli.hpp"

int main(int argc, char** argv) { return photonq::cli::run(argc, argv); }
