#include "commands.hpp"

int main(int argc, char** argv) { return netpot::cli::dispatch(argc, argv); }
