#ifndef MLFSM_ERRORS_HPP
#define MLFSM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mlfsm {

// Error taxonomy shared by the library and the CLI. Exit codes:
//   0 ok, 2 config, 3 input, 4 numerical, 5 solver, 6 capacity.
class error : public std::runtime_error {
public:
    error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg, 2) {}
};

class input_error : public error {
public:
    explicit input_error(const std::string& msg) : error(msg, 3) {}
};

class numerical_error : public error {
public:
    explicit numerical_error(const std::string& msg) : error(msg, 4) {}
};

class solver_error : public error {
public:
    explicit solver_error(const std::string& msg) : error(msg, 5) {}
};

class capacity_error : public error {
public:
    explicit capacity_error(const std::string& msg) : error(msg, 6) {}
};

} // namespace mlfsm

#endif
