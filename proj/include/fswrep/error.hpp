#pragma once

#include <stdexcept>
#include <string>

namespace fswrep {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// Invalid configuration (bad schema, empty vocabulary group, bad flag value).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input data unusable (empty corpus, too few evaluation items).
class DataError : public Error {
public:
    using Error::Error;
};

// Out-of-vocabulary word or unknown group label.
class LookupError : public Error {
public:
    using Error::Error;
};

// Non-finite value encountered while training.
class NumericError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

}  // namespace fswrep
