#include "qtele/commands.hpp"

int main(int argc, char** argv) { return qtele::cli::main_entry(argc, argv); }
