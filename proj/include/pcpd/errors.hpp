#pragma once

#include <stdexcept>

namespace pcpd {

// Malformed data: wrong shapes, out-of-range indices, invalid payloads.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameter combinations that cannot be run (empty candidate set, bad alpha, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace pcpd
