#pragma once

#include <stdexcept>
#include <string>

namespace tabsyn {

// Base class for every error raised by the library. The CLI maps these to
// exit code 2 (data error), except TrainingDiverged which maps to 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownColumn : public Error {
public:
    using Error::Error;
};

class UnknownCategory : public Error {
public:
    using Error::Error;
};

class NotDiscrete : public Error {
public:
    using Error::Error;
};

class BadCell : public Error {
public:
    using Error::Error;
};

class RaggedRow : public Error {
public:
    using Error::Error;
};

class TooFewRows : public Error {
public:
    using Error::Error;
};

class EmptyTable : public Error {
public:
    using Error::Error;
};

class DegenerateColumn : public Error {
public:
    using Error::Error;
};

class LayoutMismatch : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

class TrainingDiverged : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class ZeroSupport : public Error {
public:
    using Error::Error;
};

class ZeroDenominator : public Error {
public:
    using Error::Error;
};

class NoLines : public Error {
public:
    using Error::Error;
};

class BadFile : public Error {
public:
    using Error::Error;
};

}  // namespace tabsyn
