#pragma once

#include <stdexcept>
#include <string>

namespace qtele {

// Base of every library error; the CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class CapacityError : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class PositivityError : public Error {
public:
  using Error::Error;
};

class NormalizationError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

// A Schmidt coefficient vanished, so the biorthogonal duals do not exist.
class SingularChannelError : public Error {
public:
  using Error::Error;
};

// An operation needs rank-one POVM elements but got a higher-rank one.
class DecompositionRequiredError : public Error {
public:
  using Error::Error;
};

class ConsistencyError : public Error {
public:
  using Error::Error;
};

} // namespace qtele
