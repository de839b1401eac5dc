#ifndef CHEMFLOW_ERRORS_HPP
#define CHEMFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chemflow {

// Error taxonomy, mapped to CLI exit codes:
//   config_error    -> 1
//   numerical_error -> 2  (blowup, positivity loss, CFL escalation)
//   structure_error -> 3  (violated structural invariant)
//   io_error        -> 4  (unreadable/corrupt files, write failures)

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value or amplitude runaway detected mid-run.
class blowup_error : public numerical_error {
public:
    blowup_error(const std::string& msg, double t)
        : numerical_error(msg + " at t=" + std::to_string(t)), time(t) {}
    double time;
};

// Keller-Segel concentration dropped below the positivity floor.
class positivity_error : public numerical_error {
public:
    positivity_error(const std::string& msg, double t)
        : numerical_error(msg + " at t=" + std::to_string(t)), time(t) {}
    double time;
};

class cfl_error : public numerical_error {
public:
    cfl_error(const std::string& msg, double t)
        : numerical_error(msg + " at t=" + std::to_string(t)), time(t) {}
    double time;
};

class structure_error : public std::runtime_error {
public:
    explicit structure_error(const std::string& msg) : std::runtime_error(msg) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace chemflow

#endif
