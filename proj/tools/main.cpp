#include <string>
#include <vector>

#include "rgs/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rgs::cli::run(args);
}
