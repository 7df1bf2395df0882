#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "deskrl/common.hpp"

namespace deskrl {

enum Head : int { kHeadKind, kHeadCellX, kHeadCellY, kHeadPayload, kHeadIntent, kHeadSlot, kNumHeads };

struct PolicyShape {
  int input_dim = 512;
  int hidden = 128;
  std::array<int, kNumHeads> heads = {10, 32, 18, 8, 16, 16};

  int output_dim() const;
  int head_offset(int head) const;
  std::size_t num_params() const;
  bool operator==(const PolicyShape&) const = default;
};

/// One choice per head. slot is -1 when the screen shows no boxes.
struct CompositeAction {
  int kind = 0;
  int cx = 0;
  int cy = 0;
  int payload = 0;
  int intent = 0;
  int slot = -1;

  int choice(int head) const;
  void set_choice(int head, int value);
  bool operator==(const CompositeAction&) const = default;
};

/// Factorized categorical policy: tanh MLP with one softmax head per choice.
/// Parameters live in one flat vector: W1 (hidden x input), b1, W2 (out x hidden), b2.
class Policy {
public:
  Policy() = default;
  explicit Policy(PolicyShape shape);
  Policy(PolicyShape shape, std::uint64_t init_seed, double w1_std = 1.0, double w2_std = 0.01);

  const PolicyShape& shape() const { return shape_; }
  const Vec& params() const { return theta_; }
  Vec& params() { return theta_; }

  /// Raw head logits (before temperature).
  Vec logits(const Vec& x) const;

  /// Sum of chosen-head log-probabilities at temperature tau. The slot head is
  /// masked to the first num_boxes entries and skipped when num_boxes == 0.
  double log_prob(const Vec& x, int num_boxes, const CompositeAction& a, double tau) const;

  /// log_prob plus its gradient w.r.t. params (accumulated as scale * grad into grad).
  double log_prob_grad(const Vec& x, int num_boxes, const CompositeAction& a, double tau, double scale,
                       Vec& grad) const;

  /// Per-head probabilities at temperature tau (slot head masked).
  /// Batched form over the columns of X: returns sum_i w_i log p_i and, when
  /// grad is non-null, adds its gradient.
  double batch_log_prob(const Mat& X, const std::vector<int>& num_boxes, const std::vector<CompositeAction>& actions,
                        double tau, const Vec& weights, Vec* grad) const;

  std::array<Vec, kNumHeads> head_probs(const Vec& x, int num_boxes, double tau) const;

  CompositeAction sample(const Vec& x, int num_boxes, double tau, std::mt19937_64& rng, double* logp = nullptr) const;
  CompositeAction argmax(const Vec& x, int num_boxes) const;

private:
  struct Forward {
    Vec pre;
    Vec h;
    Vec z;
  };
  Forward forward(const Vec& x) const;
  void check_input(const Vec& x) const;
  int slot_limit(int num_boxes) const;

  PolicyShape shape_;
  Vec theta_;
};

/// Adam with bias correction; state persists across updates.
struct AdamState {
  Vec m;
  Vec v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  /// Ascent step: params += lr * adam(grad).
  void ascend(Vec& params, const Vec& grad, double lr);
};

/// Scales grad so its L2 norm is at most max_norm. Returns the pre-clip norm.
double clip_grad_norm(Vec& grad, double max_norm);

}  // namespace deskrl
