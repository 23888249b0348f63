// diagonal_cost.hpp
// Cost Hamiltonians that are diagonal in the computational basis.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mublab {

/// H_C = sum_x c(x) |x><x| on n qubits, qubit 0 = least significant bit of x.
struct DiagonalCost {
    int n_qubits = 0;
    std::vector<double> values;  // length 2^n, finite
    std::string metadata;

    DiagonalCost() = default;
    DiagonalCost(int n, std::vector<double> v, std::string meta = {});

    std::size_t size() const { return values.size(); }
    double trace() const;
};

}  // namespace mublab
