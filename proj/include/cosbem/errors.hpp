#pragma once

#include <stdexcept>
#include <string>

namespace cosbem {

// Raised when a numerical routine cannot deliver its advertised accuracy
// (quadrature non-convergence, characteristic-function instability, ...).
// The message carries enough context to locate the failing evaluation.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cosbem
