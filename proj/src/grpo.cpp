#include "deskrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deskrl {

void GrpoConfig::validate() const {
  if (!(eps_low > 0) || !(eps_high > 0)) throw Error(ErrorCode::ConfigInvalid, "grpo eps_low and eps_high must be > 0");
  if (!(beta >= 0)) throw Error(ErrorCode::ConfigInvalid, "grpo beta must be >= 0");
  if (!(temperature > 0)) throw Error(ErrorCode::ConfigInvalid, "grpo temperature must be > 0");
  if (!(lr > 0)) throw Error(ErrorCode::ConfigInvalid, "grpo lr must be > 0");
  if (batch_size <= 0) throw Error(ErrorCode::ConfigInvalid, "grpo batch_size must be > 0");
  if (epochs <= 0) throw Error(ErrorCode::ConfigInvalid, "grpo epochs must be > 0");
}

std::vector<double> compute_advantages(const std::vector<double>& rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "advantages need at least 2 rewards, got " + std::to_string(rewards.size()));
  }
  std::vector<double> adv(rewards.size(), 0.0);
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); })) return adv;

  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  if (sd == 0.0) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

double kl_k3(double logp_theta, double logp_ref) {
  const double log_rho = logp_ref - logp_theta;
  return std::exp(log_rho) - log_rho - 1.0;
}

double clipped_surrogate(double rho, double advantage, double eps_low, double eps_high) {
  const double clipped = std::clamp(rho, 1.0 - eps_low, 1.0 + eps_high);
  return std::min(rho * advantage, clipped * advantage);
}

double surrogate_objective(const Policy& policy, const std::vector<PolicySample>& samples,
                           const std::vector<std::size_t>& indices, const GrpoConfig& cfg, Vec* grad) {
  if (indices.empty()) throw Error(ErrorCode::EmptyBuffer, "surrogate over an empty batch");
  if (grad) *grad = Vec::Zero(policy.params().size());
  const double inv_n = 1.0 / static_cast<double>(indices.size());
  double total = 0.0;
  for (std::size_t idx : indices) {
    const auto& s = samples.at(idx);
    const double lp = policy.log_prob(s.x, s.num_boxes, s.action, cfg.temperature);
    const double rho = std::exp(lp - s.old_logp);
    const double A = s.advantage;
    total += clipped_surrogate(rho, A, cfg.eps_low, cfg.eps_high) - cfg.beta * kl_k3(lp, s.ref_logp);
    if (!grad) continue;

    const bool clipped = (A > 0 && rho > 1.0 + cfg.eps_high) || (A < 0 && rho < 1.0 - cfg.eps_low);
    const double d_surr = clipped ? 0.0 : rho * A;
    const double rho_ref = std::exp(s.ref_logp - lp);
    const double d_kl = 1.0 - rho_ref;  // d kl_k3 / d lp
    const double scale = inv_n * (d_surr - cfg.beta * d_kl);
    if (scale != 0.0) policy.log_prob_grad(s.x, s.num_boxes, s.action, cfg.temperature, scale, *grad);
  }
  return total * inv_n;
}

double surrogate_objective(const Policy& policy, const std::vector<PolicySample>& samples, const GrpoConfig& cfg) {
  std::vector<std::size_t> all(samples.size());
  std::iota(all.begin(), all.end(), 0);
  return surrogate_objective(policy, samples, all, cfg, nullptr);
}

UpdateStats grpo_update(Policy& policy, AdamState& opt, const std::vector<PolicySample>& samples,
                        const GrpoConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  if (samples.empty()) throw Error(ErrorCode::EmptyBuffer, "grpo update on an empty buffer");
  for (const auto& s : samples) {
    if (s.x.size() != policy.shape().input_dim) {
      throw Error(ErrorCode::ShapeMismatch, "sample features have size " + std::to_string(s.x.size()) +
                                                ", policy expects " + std::to_string(policy.shape().input_dim));
    }
  }

  UpdateStats stats;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  double norm_sum = 0.0;
  for (int ep = 0; ep < cfg.epochs; ++ep) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<std::size_t> batch(order.begin() + static_cast<long>(start),
                                           order.begin() + static_cast<long>(stop));
      Vec grad;
      const double obj = surrogate_objective(policy, samples, batch, cfg, &grad);
      if (stats.steps == 0) stats.objective_first = obj;
      norm_sum += clip_grad_norm(grad, cfg.max_grad_norm);
      opt.ascend(policy.params(), grad, cfg.lr);
      ++stats.steps;
    }
  }
  if (!policy.params().allFinite()) throw Error(ErrorCode::NonFinite, "policy parameters became non-finite");
  stats.mean_grad_norm = norm_sum / stats.steps;
  double kl = 0.0;
  for (const auto& s : samples) kl += kl_k3(policy.log_prob(s.x, s.num_boxes, s.action, cfg.temperature), s.ref_logp);
  stats.kl_after = kl / static_cast<double>(samples.size());
  return stats;
}

}  // namespace deskrl
