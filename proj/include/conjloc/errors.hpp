#pragma once

#include <stdexcept>
#include <string>

namespace conjloc {

// Chart point too close to a chart pole; the caller should switch charts.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Degenerate metric or other geometric breakdown.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Step-size underflow, step budget exhausted, or unit-speed drift.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No sign change of xi1 before s_max. Not a numerical failure.
class NoConjugatePoint : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace conjloc
