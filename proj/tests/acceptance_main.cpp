#include "thinfilm/acceptance.hpp"

int main() { return thinfilm::acceptance_main(); }
