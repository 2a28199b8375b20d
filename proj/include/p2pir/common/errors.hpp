#pragma once

#include <stdexcept>
#include <string>

namespace p2pir {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class WireFormatError : public Error {
public:
    using Error::Error;
};

class SchemeMismatch : public Error {
public:
    using Error::Error;
};

class DecryptionFailure : public Error {
public:
    using Error::Error;
};

class StoreCorruption : public Error {
public:
    using Error::Error;
};

class CryptoBackendError : public Error {
public:
    using Error::Error;
};

}  // namespace p2pir
