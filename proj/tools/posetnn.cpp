#include <iostream>

#include "posetnn/cli.hpp"

int main(int argc, char** argv)
{
    return posetnn::cli::dispatch(argc, argv, std::cout, std::cerr);
}
