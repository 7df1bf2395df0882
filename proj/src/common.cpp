#include "deskrl/common.hpp"

#include <cctype>

namespace deskrl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::EmptyBuffer: return "EmptyBuffer";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::WorldFormat: return "WorldFormat";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::CheckpointInvalid: return "CheckpointInvalid";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 128 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace deskrl
