#include "m3sim/error.hpp"

namespace m3sim {

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

}  // namespace m3sim
