#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace transq {

// Invalid parameters or preconditions (negative rates, n = 0, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the range where a numeric kernel is defined.
class OutOfDomain : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// f_T(0) = 0: no service scale can make the system critical.
class CriticalityImpossible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The embedded model needs a customer but the population is empty.
class PopulationExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A busy period was requested on a path that starts empty.
class UndefinedBusyPeriod : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Asymptotic tail formula evaluated where F3'(x) <= 0.
class OutsideAsymptoticRegime : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved, double requested)
        : std::runtime_error(what + " (achieved " + sci(achieved) + ", requested " + sci(requested) + ")"),
          achieved_(achieved),
          requested_(requested) {}

    double achieved_tolerance() const noexcept { return achieved_; }
    double requested_tolerance() const noexcept { return requested_; }

private:
    static std::string sci(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    double achieved_;
    double requested_;
};

// Malformed experiment or model configuration; `path` names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace transq
