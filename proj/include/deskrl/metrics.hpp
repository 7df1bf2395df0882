#pragma once

#include <utility>
#include <vector>

#include "deskrl/common.hpp"

namespace deskrl {

/// Post-action embeddings of one episode.
struct Trajectory {
  std::vector<Vec> o;
  std::vector<Vec> e;
  std::vector<bool> format_ok;
  int episode = 0;
  int env = 0;

  std::size_t length() const { return o.size(); }
};

/// (1 / (n (n - 1))) * sum over k < l of (1 - sim). n >= 2.
double pairwise_diversity(const std::vector<Vec>& states);

/// (d_vis, d_text) of one trajectory. TooShort when T < 2.
std::pair<double, double> traj_diversity(const Trajectory& traj);

/// Same measure over all states of all trajectories. TooShort when N < 2 or
/// any trajectory has T < 2.
std::pair<double, double> group_diversity(const std::vector<Trajectory>& group);

/// Fraction of true flags. EmptySample on empty input.
double correct_format_rate(const std::vector<bool>& format_ok);

double avg_diversity(double d_vis, double d_text, double D_vis, double D_text);

/// One evaluation row: the format rate and the four diversity values plus their mean.
struct DiversityReport {
  double correct_format = 0;
  double d_vis = 0;
  double d_text = 0;
  double D_vis = 0;
  double D_text = 0;
  double avg = 0;
};

/// Trajectory metrics are averaged over the group; group metrics pool all states.
DiversityReport diversity_report(const std::vector<Trajectory>& group);

}  // namespace deskrl
