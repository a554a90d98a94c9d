#pragma once

#include <stdexcept>
#include <string>

namespace alinet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input-file problems: wrong field counts, bad numbers, unknown keys.
struct ParseError : Error { using Error::Error; };
// A name or id that should resolve but does not.
struct ReferentialError : Error { using Error::Error; };
// Incompatible matrix/tensor dimensions.
struct ShapeError : Error { using Error::Error; };
// Invalid or inconsistent configuration.
struct ConfigError : Error { using Error::Error; };
// Corrupt or truncated serialized data.
struct FormatError : Error { using Error::Error; };
// Non-finite values where finite ones are required.
struct NumericError : Error { using Error::Error; };
// Negative sampling cannot satisfy its constraints.
struct SamplingError : Error { using Error::Error; };
// Evaluation asked for something the candidate sets cannot answer.
struct EvalError : Error { using Error::Error; };
// Training produced a non-finite loss.
struct DivergenceError : Error { using Error::Error; };

}  // namespace alinet
