#pragma once

#include <stdexcept>
#include <string>

namespace zoolab {

// Maps to process exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Maps to process exit code 3 (memory/size guard tripped).
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace zoolab
