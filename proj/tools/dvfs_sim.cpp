#include "dvfs/cli.hpp"

int main(int argc, char** argv)
{
    return dvfs::cli::run(argc, argv);
}
