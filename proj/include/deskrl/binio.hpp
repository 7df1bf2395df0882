#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>

#include "deskrl/common.hpp"

namespace deskrl {

/// Little-endian-as-host binary writer used by checkpoints and buffer dumps.
class BinWriter {
public:
  template <typename T>
  void pod(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_ += s;
  }
  void vec(const Vec& v) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    out_.append(reinterpret_cast<const char*>(v.data()), static_cast<std::size_t>(v.size()) * sizeof(double));
  }
  const std::string& bytes() const { return out_; }

private:
  std::string out_;
};

class BinReader {
public:
  explicit BinReader(std::string_view data) : data_(data) {}

  template <typename T>
  T pod() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Vec vec() {
    const auto n = pod<std::uint64_t>();
    if (n > (data_.size() - pos_) / sizeof(double)) fail();
    Vec v(static_cast<Eigen::Index>(n));
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) fail();
  }
  [[noreturn]] static void fail() { throw Error(ErrorCode::CheckpointInvalid, "truncated binary data"); }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace deskrl
