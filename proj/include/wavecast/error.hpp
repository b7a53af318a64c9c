#pragma once

#include <stdexcept>
#include <string>

namespace wavecast {

/// Base error for everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wavecast
