#include "risklab/error.hpp"

namespace risklab {

void require(bool condition, const std::string& message) {
    if (!condition)
        throw Error(message);
}

} // namespace risklab
