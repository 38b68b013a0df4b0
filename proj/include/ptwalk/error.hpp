#pragma once

#include <stdexcept>
#include <string>

namespace ptwalk {

//! Malformed call: wrong dimension, empty input, out-of-range index.
class InputError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! Invalid configuration or target specification.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Chain could not be started from the supplied points.
class InitError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Non-finite intermediate (e.g. gradient) that makes a computation unusable.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Input data inconsistent with the target (point outside support, ...).
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace ptwalk
