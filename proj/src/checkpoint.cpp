#include "deskrl/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "deskrl/binio.hpp"

namespace deskrl {

namespace {

constexpr char kMagic[8] = {'D', 'S', 'K', 'R', 'L', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindPolicy = 1;
constexpr std::uint32_t kKindWorldModel = 2;

void write_file(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write checkpoint '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorCode::Io, "cannot rename into '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void header(BinWriter& w, std::uint32_t kind) {
  for (char c : kMagic) w.pod(c);
  w.pod(kVersion);
  w.pod(kind);
}

void check_header(BinReader& r, std::uint32_t kind, const std::string& path) {
  for (char c : kMagic) {
    if (r.pod<char>() != c) throw Error(ErrorCode::CheckpointInvalid, "'" + path + "' is not a checkpoint");
  }
  if (r.pod<std::uint32_t>() != kVersion) throw Error(ErrorCode::CheckpointInvalid, "unsupported checkpoint version");
  if (r.pod<std::uint32_t>() != kind) throw Error(ErrorCode::CheckpointInvalid, "'" + path + "' holds another model");
}

std::string describe(const PolicyShape& s) {
  std::string out = std::to_string(s.input_dim) + "->" + std::to_string(s.hidden) + "->[";
  for (std::size_t i = 0; i < s.heads.size(); ++i) out += (i ? "," : "") + std::to_string(s.heads[i]);
  return out + "]";
}

std::string describe(const WorldModelShape& s) {
  return std::to_string(s.dim_visual) + "+" + std::to_string(s.dim_text) + "+" + std::to_string(s.action_dim) +
         "->" + std::to_string(s.hidden);
}

}  // namespace

void save_policy(const std::string& path, const Policy& policy, const AdamState& opt) {
  BinWriter w;
  header(w, kKindPolicy);
  const auto& s = policy.shape();
  w.pod<std::int32_t>(s.input_dim);
  w.pod<std::int32_t>(s.hidden);
  for (int h : s.heads) w.pod<std::int32_t>(h);
  w.vec(policy.params());
  w.pod<std::int64_t>(opt.t);
  w.vec(opt.m);
  w.vec(opt.v);
  write_file(path, w.bytes());
}

PolicyCheckpoint load_policy(const std::string& path) {
  const std::string bytes = read_file(path);
  BinReader r(bytes);
  check_header(r, kKindPolicy, path);
  PolicyShape s;
  s.input_dim = r.pod<std::int32_t>();
  s.hidden = r.pod<std::int32_t>();
  for (int& h : s.heads) h = r.pod<std::int32_t>();
  PolicyCheckpoint ck{Policy(s), {}};
  Vec theta = r.vec();
  if (theta.size() != ck.policy.params().size()) throw Error(ErrorCode::CheckpointInvalid, "parameter count mismatch");
  ck.policy.params() = std::move(theta);
  ck.optimizer.t = r.pod<std::int64_t>();
  ck.optimizer.m = r.vec();
  ck.optimizer.v = r.vec();
  if (!r.done()) throw Error(ErrorCode::CheckpointInvalid, "trailing bytes in '" + path + "'");
  if (!ck.policy.params().allFinite()) throw Error(ErrorCode::CheckpointInvalid, "non-finite parameters in '" + path + "'");
  return ck;
}

PolicyCheckpoint load_policy(const std::string& path, const PolicyShape& expected) {
  auto ck = load_policy(path);
  if (!(ck.policy.shape() == expected)) {
    throw Error(ErrorCode::ShapeMismatch, "checkpoint '" + path + "' has policy shape " +
                                              describe(ck.policy.shape()) + ", config expects " + describe(expected));
  }
  return ck;
}

void save_world_model(const std::string& path, const WorldModel& model) {
  BinWriter w;
  header(w, kKindWorldModel);
  const auto& s = model.shape();
  w.pod<std::int32_t>(s.dim_visual);
  w.pod<std::int32_t>(s.dim_text);
  w.pod<std::int32_t>(s.action_dim);
  w.pod<std::int32_t>(s.hidden);
  w.vec(model.params());
  w.pod<std::int64_t>(model.steps());
  write_file(path, w.bytes());
}

WorldModelCheckpoint load_world_model(const std::string& path, const WorldModelShape& expected) {
  const std::string bytes = read_file(path);
  BinReader r(bytes);
  check_header(r, kKindWorldModel, path);
  WorldModelShape s;
  s.dim_visual = r.pod<std::int32_t>();
  s.dim_text = r.pod<std::int32_t>();
  s.action_dim = r.pod<std::int32_t>();
  s.hidden = r.pod<std::int32_t>();
  if (!(s == expected)) {
    throw Error(ErrorCode::ShapeMismatch,
                "checkpoint '" + path + "' has world model shape " + describe(s) + ", config expects " + describe(expected));
  }
  WorldModelCheckpoint ck{WorldModel(s)};
  Vec theta = r.vec();
  if (theta.size() != ck.model.params().size()) throw Error(ErrorCode::CheckpointInvalid, "parameter count mismatch");
  ck.model.params() = std::move(theta);
  ck.model.set_steps(r.pod<std::int64_t>());
  if (!r.done()) throw Error(ErrorCode::CheckpointInvalid, "trailing bytes in '" + path + "'");
  return ck;
}

}  // namespace deskrl
