#pragma once

#include <stdexcept>
#include <string>

namespace mwgl {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, bad parameter ranges, etc.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A graph (or the Kronecker-sum product of two graphs) has more than one
/// zero Laplacian eigenvalue, so pseudo-determinants and pseudo-inverses
/// are not defined the way the estimator needs them.
class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

/// A PGD iterate left the connected region mid-solve.
class DisconnectedIterate : public DisconnectedGraph {
 public:
  using DisconnectedGraph::DisconnectedGraph;
};

class NonFiniteObjective : public Error {
 public:
  using Error::Error;
};

/// Objective increased for too many consecutive iterations at a fixed step.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// A missing node has no observed entry in its row or column.
class EmptyNeighborhood : public Error {
 public:
  using Error::Error;
};

/// No fully observed column (or row) exists for masked statistics.
class NoCleanFiber : public Error {
 public:
  using Error::Error;
};

/// A random-graph generator failed to produce a connected graph.
class ConnectivityFailure : public Error {
 public:
  using Error::Error;
};

class ZeroTrace : public Error {
 public:
  using Error::Error;
};

/// Edge-recovery truth with no positives or no negatives.
class DegenerateSupport : public Error {
 public:
  using Error::Error;
};

class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mwgl
