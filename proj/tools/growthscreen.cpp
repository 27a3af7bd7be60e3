#include <iostream>

#include "growthscreen/cli.hpp"

int main(int argc, char** argv) {
    return growthscreen::cli::run(argc, argv, std::cout, std::cerr);
}
