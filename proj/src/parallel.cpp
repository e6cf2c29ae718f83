#include "gevqmc/parallel.hpp"

namespace gevqmc {

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace gevqmc
