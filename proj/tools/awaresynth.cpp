#include <string>
#include <vector>

#include "awaresynth/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return aware::cli::run(std::move(args));
}
