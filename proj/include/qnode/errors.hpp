#pragma once

#include <stdexcept>
#include <string>

namespace qnode {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error { using Error::Error; };

// envelope
struct GridTooNarrow : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// node parameters
struct UndefinedForZeroGamma : Error { using Error::Error; };
struct NotSingleLevel : Error { using Error::Error; };

// synthesis / multilevel
struct Infeasible : Error { using Error::Error; };
struct ChirpedInput : Error { using Error::Error; };
struct DegenerateBranching : Error { using Error::Error; };
struct NoRootInUnitInterval : Error { using Error::Error; };

// simulator
struct GridMismatch : Error { using Error::Error; };
struct StepTooCoarse : Error { using Error::Error; };
struct ZeroField : Error { using Error::Error; };

// config / io
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace qnode
