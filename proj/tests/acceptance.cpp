#include <iostream>

#include "btq/acceptance.hpp"

int main() {
    btq::acceptance::Options opt;
    opt.golden_dir = BTQ_GOLDEN_DIR;
    bool ok = true;
    for (const auto& [id, name] : btq::acceptance::criteria()) {
        opt.only = {id};
        auto o = btq::acceptance::run(opt).front();
        std::cout << btq::acceptance::format(o) << std::endl;
        ok = ok && o.pass;
    }
    return ok ? 0 : 1;
}
