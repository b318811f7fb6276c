#include "invariance/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return invariance::run_cli(argc, argv, std::cout, std::cerr);
}
