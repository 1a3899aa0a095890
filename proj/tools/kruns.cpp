#include <iostream>

#include "kruns/cli.hpp"

int main(int argc, char** argv) {
    return kruns::cli::run(argc, argv, std::cout, std::cerr);
}
