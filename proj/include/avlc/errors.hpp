#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avlc {

/// Base class for every error raised by the simulator.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class length_error : public error {
public:
    using error::error;
};

class parameter_error : public error {
public:
    using error::error;
};

class range_error : public error {
public:
    using error::error;
};

class empty_input : public error {
public:
    using error::error;
};

class divide_by_zero : public error {
public:
    using error::error;
};

/// Matrix is numerically singular; for H this means a rank-deficient (blocked) channel.
class singular_matrix : public error {
public:
    using error::error;
};

class scheme_error : public error {
public:
    using error::error;
};

class sync_not_found : public error {
public:
    using error::error;
};

/// Both LED->PD paths of the diversity combiner are dead.
class dead_channel : public error {
public:
    using error::error;
};

class bad_code : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

class calibration_impossible : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& what)
        : error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class validation_error : public error {
public:
    validation_error(std::string key, const std::string& what)
        : error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace avlc
