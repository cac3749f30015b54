#include "fgtsva/harness.hpp"

int main(int argc, char** argv) { return fgtsva::cli_main(argc, argv); }
