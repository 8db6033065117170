#include <vector>

#include "tabsyn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tabsyn::cli::run(args);
}
