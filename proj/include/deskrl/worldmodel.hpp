#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "deskrl/action_grammar.hpp"
#include "deskrl/common.hpp"

namespace deskrl {

inline constexpr int kPayloadBuckets = 16;
inline constexpr int kActionEncodingDim = kNumActionKinds + 2 + kPayloadBuckets;

/// One-hot kind, normalized coordinates (zero for Key/None) and a hashed
/// payload bucket for Key/Text.
Vec encode_action(const Action& action, int width_px, int height_px);

struct WorldModelShape {
  int dim_visual = 256;
  int dim_text = 256;
  int action_dim = kActionEncodingDim;
  int hidden = 128;

  int input_dim() const { return dim_visual + dim_text + action_dim; }
  int output_dim() const { return dim_visual + dim_text; }
  std::size_t num_params() const;
  bool operator==(const WorldModelShape&) const = default;
};

/// (s, a) -> s' training pair in embedding space.
struct WmExample {
  Vec o;
  Vec e;
  Vec a;
  Vec o_next;
  Vec e_next;
};

struct Prediction {
  Vec o;
  Vec e;
};

/// One-hidden-layer tanh predictor of the next state's embeddings.
class WorldModel {
public:
  WorldModel() = default;
  explicit WorldModel(WorldModelShape shape);
  WorldModel(WorldModelShape shape, std::uint64_t init_seed, double w1_std = 1.0);

  const WorldModelShape& shape() const { return shape_; }
  const Vec& params() const { return theta_; }
  Vec& params() { return theta_; }
  std::int64_t steps() const { return steps_; }
  void set_steps(std::int64_t s) { steps_ = s; }

  Vec input(const Vec& o, const Vec& e, const Vec& a) const;
  /// Unclamped output [o_hat ++ e_hat] that the loss is defined on.
  Vec raw(const Vec& x) const;
  /// Clamped at zero and L2-normalized per block.
  Prediction predict(const Vec& o, const Vec& e, const Vec& a) const;

  /// Mean over examples of |raw - [o' ++ e']|^2; adds its gradient into grad when non-null.
  double loss(const std::vector<const WmExample*>& batch, Vec* grad) const;
  double loss(const std::vector<WmExample>& data) const;

  /// Mini-batch gradient descent with global-norm clipping. Returns the mean
  /// loss of each epoch (taken over its mini-batches before each step).
  std::vector<double> train_epochs(const std::vector<WmExample>& data, int epochs, double lr, int batch_size,
                                   double max_grad_norm, std::mt19937_64& rng);

private:
  void check(const Vec& v, int dim, const char* what) const;

  WorldModelShape shape_;
  Vec theta_;
  std::int64_t steps_ = 0;
};

/// (1 - sim(o', o_hat), 1 - sim(e', e_hat)).
std::pair<double, double> curiosity(const Vec& o_next, const Vec& o_hat, const Vec& e_next, const Vec& e_hat);

}  // namespace deskrl
