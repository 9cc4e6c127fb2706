#include <iostream>

#include "ddsim/cli.hpp"

int main(int argc, char** argv)
{
    return ddsim::cli_main(argc, argv, std::cout, std::cerr);
}
