#include "refine/cli.hpp"

#include <exception>
#include <iostream>

int main(int argc, char** argv)
{
    try
    {
        return refine::run_cli(argc, argv, std::cout, std::cerr);
    }
    catch (const std::exception& e)
    {
        std::cerr << "refine: " << e.what() << '\n';
        return 1;
    }
}
