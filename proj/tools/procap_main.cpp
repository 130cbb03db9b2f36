#include "procap/cli.hpp"

int main(int argc, char** argv) {
    return procap::cli::run(argc, argv);
}
