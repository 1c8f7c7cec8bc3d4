#include "cli.hpp"

int main(int argc, char** argv) { return dustgrcm::cli::run(argc, argv); }
