#ifndef CROPML_ERROR_HPP
#define CROPML_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cropml {

// Error categories map 1:1 onto CLI exit codes (usage=1, data=2, numeric=3).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cropml

#endif
