// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_ERRORS_HPP
#define RAMIX_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ramix
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Argument outside the mathematical domain of an operation (non-finite input, negative width, ...)
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    class SingularMatrixError : public Error
    {
    public:
        SingularMatrixError(const std::string &what, double smallest_singular_value)
            : Error(what), smallest_singular_value(smallest_singular_value) {}
        double smallest_singular_value;
    };

    class DegenerateChannelError : public Error
    {
    public:
        using Error::Error;
    };

    // Scenario failed validation; `offenders` names each user that broke a rule
    class ValidationError : public Error
    {
    public:
        ValidationError(const std::string &what, std::vector<std::string> offenders)
            : Error(what), offenders(std::move(offenders)) {}
        std::vector<std::string> offenders;
    };

    class SolverError : public Error
    {
    public:
        SolverError(const std::string &what, std::vector<double> last_iterate)
            : Error(what), last_iterate(std::move(last_iterate)) {}
        std::vector<double> last_iterate;
    };

    class ConfigError : public Error
    {
    public:
        ConfigError(const std::string &what, int line = 0, std::string field = {})
            : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
              line(line), field(std::move(field)) {}
        int line;
        std::string field;
    };
}

#endif
