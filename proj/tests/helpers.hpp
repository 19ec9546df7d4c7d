#pragma once
// Literal builders shared by the test suites.

#include <initializer_list>
#include <vector>

#include "rumin/linalg.hpp"

namespace testutil {

inline rumin::la::Vec V(std::initializer_list<long> xs) {
    rumin::la::Vec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

inline rumin::la::Matrix M(std::initializer_list<std::initializer_list<long>> rows) {
    std::vector<rumin::la::Vec> rs;
    int cols = 0;
    for (auto& r : rows) {
        rs.push_back(V(r));
        cols = int(r.size());
    }
    return rumin::la::Matrix::from_rows(rs, cols);
}

}  // namespace testutil
