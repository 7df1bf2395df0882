#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace deskrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  StepLimitExceeded,
  DimensionMismatch,
  IndexOutOfRange,
  TooFewSamples,
  TooShort,
  EmptySample,
  EmptyBuffer,
  EmptyDataset,
  ShapeMismatch,
  WorldFormat,
  ConfigInvalid,
  CheckpointInvalid,
  NonFinite,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Library error. Every throw site in deskrl uses this type so callers can
/// map failures to CLI exit codes by `code()`.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// SplitMix64 finalizer; used wherever a stable integer mix is needed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive a child seed from a parent seed and a list of stream indices.
template <typename... Ts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Ts... streams) {
  std::uint64_t s = mix64(seed);
  ((s = mix64(s ^ static_cast<std::uint64_t>(streams))), ...);
  return s;
}

/// Lowercase, split on anything that is not an ASCII letter or digit.
/// Shared by synthetic OCR, typed text and intent strings.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace deskrl
