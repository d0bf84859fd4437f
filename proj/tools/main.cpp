#include <string>
#include <vector>

#include "lczmap/cli.hpp"

int main(int argc, char** argv) {
    return lczmap::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
