#include "dtnsim/cli.hpp"

int main(int argc, char** argv) {
    return dtnsim::cli_main(argc, argv);
}
