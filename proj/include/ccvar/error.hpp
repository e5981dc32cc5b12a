#ifndef CCVAR_ERROR_HPP
#define CCVAR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ccvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (t <= 0, s < 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Copula or model parameter outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A closed-form evaluation left the representable double range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Derivative order, Stirling index or dimension out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Vector lengths or panel shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A conditional expectation whose conditioning event has (numerically) zero mass.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Quadrature did not reach its tolerance within the subdivision budget.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Too few Monte-Carlo draws landed in the conditioning set.
class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

/// Optimizer failed; carries the best iterate it found.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best)
        : Error(what), best_(std::move(best)) {}
    const std::vector<double>& best_iterate() const noexcept { return best_; }

private:
    std::vector<double> best_;
};

/// Fitted variance equation sits on (or beyond) the stationarity boundary.
class StationarityError : public Error {
public:
    using Error::Error;
};

/// Model lacks the filtered state required for forecasting or PIT.
class StateError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message carries the line number.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace ccvar

#endif
