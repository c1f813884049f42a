#include "conic_spde/errors.hpp"

namespace conic {

void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

}  // namespace conic
