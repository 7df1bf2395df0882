#pragma once

#include <random>
#include <vector>

#include "deskrl/common.hpp"
#include "deskrl/policy.hpp"

namespace deskrl {

struct GrpoConfig {
  double beta = 0.04;
  double eps_low = 0.2;
  double eps_high = 0.28;
  double lr = 1e-4;
  double temperature = 1.0;
  double max_grad_norm = 1.0;
  int batch_size = 16;
  int epochs = 1;

  void validate() const;
};

/// Whole-buffer z-scores with population std; all zeros when rewards are constant.
std::vector<double> compute_advantages(const std::vector<double>& rewards);

/// rho - log(rho) - 1 with rho = exp(logp_ref - logp_theta).
double kl_k3(double logp_theta, double logp_ref);

/// min(rho * A, clip(rho, 1 - eps_low, 1 + eps_high) * A).
double clipped_surrogate(double rho, double advantage, double eps_low, double eps_high);

/// Everything the update needs from one buffer sample.
struct PolicySample {
  Vec x;
  int num_boxes = 0;
  CompositeAction action;
  double old_logp = 0;
  double ref_logp = 0;
  double advantage = 0;
};

/// Mean over the given samples of clipped_surrogate - beta * kl_k3. When grad
/// is non-null it receives the gradient w.r.t. policy params.
double surrogate_objective(const Policy& policy, const std::vector<PolicySample>& samples,
                           const std::vector<std::size_t>& indices, const GrpoConfig& cfg, Vec* grad);
double surrogate_objective(const Policy& policy, const std::vector<PolicySample>& samples, const GrpoConfig& cfg);

struct UpdateStats {
  int steps = 0;
  double objective_first = 0;  // objective on the first mini-batch, before any step
  double mean_grad_norm = 0;   // pre-clip
  double kl_after = 0;         // mean kl_k3 to the reference over the buffer after the update
};

/// Mini-batch gradient ascent on the surrogate (shuffled order, norm-clipped).
UpdateStats grpo_update(Policy& policy, AdamState& opt, const std::vector<PolicySample>& samples,
                        const GrpoConfig& cfg, std::mt19937_64& rng);

}  // namespace deskrl
