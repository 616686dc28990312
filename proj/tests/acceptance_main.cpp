#include <cstdio>

#include "reluforge/acceptance.hpp"

int main() {
    bool all = true;
    for (const auto& c : reluforge::run_acceptance()) {
        std::printf("%s criterion %d (%s): %s\n", c.pass ? "[PASS]" : "[FAIL]", c.id,
                    c.name.c_str(), c.detail.c_str());
        std::fflush(stdout);
        all = all && c.pass;
    }
    return all ? 0 : 1;
}
