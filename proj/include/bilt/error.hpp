#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bilt {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The pooled covariance of one block is not numerically positive definite.
class SingularBlockCovariance : public Error {
public:
    SingularBlockCovariance(std::size_t block_index, const std::string& what)
        : Error(what), block_index_(block_index) {}

    std::size_t block_index() const noexcept { return block_index_; }

private:
    std::size_t block_index_;
};

/// Hotelling's T^2 needs p <= N - 2.
class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

/// N must be at least the largest block size plus three.
class InsufficientSampleSize : public Error {
public:
    using Error::Error;
};

class LagTooLarge : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

} // namespace bilt
