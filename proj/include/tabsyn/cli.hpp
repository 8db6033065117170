#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace tabsyn::cli {

inline int run(const std::vector<std::string>& args) {
    (void)args;
    std::cerr << "not yet implemented\n";
    return 1;
}

}  // namespace tabsyn::cli
