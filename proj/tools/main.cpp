#include <string>
#include <vector>

#include "reluforge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return reluforge::run_cli(args);
}
