#include "cli.hpp"

int main(int argc, char** argv)
{
    return vemcdr::cli::run(argc, argv);
}
