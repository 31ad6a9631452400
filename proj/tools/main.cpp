#include <iostream>

#include "biasaudit/cli.hpp"

int main(int argc, char** argv) {
    return biasaudit::run_cli(argc, argv, std::cout, std::cerr);
}
