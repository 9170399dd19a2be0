#include "dispatch.hpp"

int main(int argc, char** argv) { return dspec::cli::dispatch(argc, argv); }
