#include "phibvp/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return phibvp::run_cli(argc, argv, std::cout, std::cerr);
}
