#include <string>
#include <vector>

#include "tsmotif/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tsmotif::run_cli(args);
}
