#include "deskrl/metrics.hpp"

namespace deskrl {

double pairwise_diversity(const std::vector<Vec>& states) {
  const auto n = static_cast<Eigen::Index>(states.size());
  if (n < 2) throw Error(ErrorCode::TooShort, "diversity needs at least 2 states, got " + std::to_string(n));
  const Eigen::Index dim = states.front().size();
  Mat U(dim, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec& s = states[static_cast<std::size_t>(k)];
    if (s.size() != dim) throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
    const double norm = s.norm();
    U.col(k) = norm > 0 ? Vec(s / norm) : Vec::Zero(dim);
  }
  const Mat G = U.transpose() * U;
  double sum = 0.0;
  for (Eigen::Index l = 1; l < n; ++l) {
    for (Eigen::Index k = 0; k < l; ++k) sum += 1.0 - G(k, l);
  }
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

std::pair<double, double> traj_diversity(const Trajectory& traj) {
  if (traj.o.size() < 2 || traj.e.size() != traj.o.size()) {
    throw Error(ErrorCode::TooShort, "trajectory diversity needs T >= 2, got " + std::to_string(traj.o.size()));
  }
  return {pairwise_diversity(traj.o), pairwise_diversity(traj.e)};
}

std::pair<double, double> group_diversity(const std::vector<Trajectory>& group) {
  std::vector<Vec> o;
  std::vector<Vec> e;
  for (const auto& t : group) {
    if (t.o.size() < 2 || t.e.size() != t.o.size()) {
      throw Error(ErrorCode::TooShort, "every trajectory in a group needs T >= 2");
    }
    o.insert(o.end(), t.o.begin(), t.o.end());
    e.insert(e.end(), t.e.begin(), t.e.end());
  }
  if (o.size() < 2) throw Error(ErrorCode::TooShort, "group diversity needs N >= 2");
  return {pairwise_diversity(o), pairwise_diversity(e)};
}

double correct_format_rate(const std::vector<bool>& format_ok) {
  if (format_ok.empty()) throw Error(ErrorCode::EmptySample, "format rate of an empty sample");
  std::size_t ok = 0;
  for (bool f : format_ok) ok += f ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(format_ok.size());
}

double avg_diversity(double d_vis, double d_text, double D_vis, double D_text) {
  return (d_vis + d_text + D_vis + D_text) / 4.0;
}

DiversityReport diversity_report(const std::vector<Trajectory>& group) {
  if (group.empty()) throw Error(ErrorCode::EmptySample, "diversity report of an empty group");
  DiversityReport r;
  std::vector<bool> flags;
  for (const auto& t : group) {
    const auto [dv, dt] = traj_diversity(t);
    r.d_vis += dv;
    r.d_text += dt;
    flags.insert(flags.end(), t.format_ok.begin(), t.format_ok.end());
  }
  r.d_vis /= static_cast<double>(group.size());
  r.d_text /= static_cast<double>(group.size());
  std::tie(r.D_vis, r.D_text) = group_diversity(group);
  r.correct_format = correct_format_rate(flags);
  r.avg = avg_diversity(r.d_vis, r.d_text, r.D_vis, r.D_text);
  return r;
}

}  // namespace deskrl
