#include "imcv/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return imcv::dispatch(argc, argv, std::cout, std::cerr);
}
