#include <iostream>

#include "rtkm/cli.hpp"

int main(int argc, char** argv) {
    return rtkm::run_cli(argc, argv, std::cout, std::cerr);
}
