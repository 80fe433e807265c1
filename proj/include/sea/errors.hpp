#ifndef SEA_ERRORS_HPP
#define SEA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sea {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- data / series errors ---

// Series too short or zero-variance where statistics are required.
class DegenerateSeries : public Error {
public:
    using Error::Error;
};

// Malformed CSV row; message carries the 1-based line number.
class ParseError : public Error {
public:
    using Error::Error;
};

// Missing or non-monotone hour in an hourly series.
class GapError : public Error {
public:
    using Error::Error;
};

// CSV header does not match the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Boundary or index outside the valid range.
class OutOfRange : public Error {
public:
    using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input shorter than the operation requires.
class TooShort : public Error {
public:
    using Error::Error;
};

// --- numerical kernel errors ---

class InsufficientData : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class ArityMismatch : public Error {
public:
    using Error::Error;
};

// Training loss became non-finite.
class NumericalDivergence : public Error {
public:
    using Error::Error;
};

// --- metric / test errors ---

// MAPE is undefined when an actual value is zero.
class ZeroActual : public Error {
public:
    using Error::Error;
};

class TooFewPairs : public Error {
public:
    using Error::Error;
};

class AllZeroDifferences : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// --- pipeline stage errors ---

class DecompositionError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// Test data does not start immediately after the training data.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Aggregated failure from an experiment grid.
class ExperimentError : public Error {
public:
    using Error::Error;
};

} // namespace sea

#endif // SEA_ERRORS_HPP
