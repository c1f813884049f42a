#include "conic_spde/cli.hpp"

int main(int argc, char** argv) { return conic::dispatch(argc, argv); }
