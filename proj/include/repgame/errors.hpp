#pragma once

#include <stdexcept>
#include <string>

namespace repgame {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionFailed : Error {
  using Error::Error;
};
struct InvalidPrior : Error {
  using Error::Error;
};
struct Unbounded : Error {
  using Error::Error;
};
struct InitialSegment : Error {
  using Error::Error;
};
struct SingularSystem : Error {
  using Error::Error;
};
struct NonConvergence : Error {
  using Error::Error;
};
struct ZeroProbabilityObservation : Error {
  using Error::Error;
};
struct MissingOffPathBelief : Error {
  using Error::Error;
};
struct NoLoop : Error {
  using Error::Error;
};
struct EmptySubset : Error {
  using Error::Error;
};
struct FullSet : Error {
  using Error::Error;
};
struct Overlap : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};

}  // namespace repgame
