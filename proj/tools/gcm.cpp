#include "gcmoment/cli.hpp"

int main(int argc, char** argv) { return gcmoment::run(argc, argv); }
