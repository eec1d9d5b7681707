#pragma once

#include <stdexcept>
#include <string>

namespace phifam {

// Every numerical failure the library reports derives from Error so callers
// (the CLI in particular) can map the whole family onto one exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NonPositiveInput : Error { using Error::Error; };
struct DivergentMoment : Error { using Error::Error; };
struct DivergentIntegral : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };
struct SupportMismatch : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct SingularMetric : Error { using Error::Error; };
struct SpaceMismatch : Error { using Error::Error; };

// Malformed input (bad deformer parameters, unsorted tables, ...). Not a
// domain finding, so it is kept outside the Error hierarchy.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace phifam
