#include "deskrl/worldmodel.hpp"

#include <algorithm>
#include <numeric>

#include "deskrl/embed.hpp"
#include "deskrl/policy.hpp"

namespace deskrl {

Vec encode_action(const Action& action, int width_px, int height_px) {
  Vec v = Vec::Zero(kActionEncodingDim);
  v[static_cast<int>(action.kind)] = 1.0;
  if (has_coords(action.kind) && action.x && action.y) {
    v[kNumActionKinds] = std::clamp(static_cast<double>(*action.x) / width_px, 0.0, 1.0);
    v[kNumActionKinds + 1] = std::clamp(static_cast<double>(*action.y) / height_px, 0.0, 1.0);
  }
  const std::optional<std::string>& payload = action.kind == ActionKind::Key ? action.key : action.text;
  if ((action.kind == ActionKind::Key || action.kind == ActionKind::Text) && payload) {
    v[kNumActionKinds + 2 + static_cast<int>(hash_token(*payload, 0) % kPayloadBuckets)] = 1.0;
  }
  return v;
}

std::size_t WorldModelShape::num_params() const {
  const auto in = static_cast<std::size_t>(input_dim());
  const auto hid = static_cast<std::size_t>(hidden);
  const auto out = static_cast<std::size_t>(output_dim());
  return hid * in + hid + out * hid + out;
}

WorldModel::WorldModel(WorldModelShape shape)
    : shape_(shape), theta_(Vec::Zero(static_cast<Eigen::Index>(shape.num_params()))) {
  if (shape_.dim_visual <= 0 || shape_.dim_text <= 0 || shape_.action_dim < 0 || shape_.hidden <= 0) {
    throw Error(ErrorCode::ShapeMismatch, "world model dims must be positive");
  }
}

WorldModel::WorldModel(WorldModelShape shape, std::uint64_t init_seed, double w1_std) : WorldModel(shape) {
  std::mt19937_64 rng(init_seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const Eigen::Index w1 = static_cast<Eigen::Index>(shape_.hidden) * shape_.input_dim();
  for (Eigen::Index i = 0; i < w1; ++i) theta_[i] = w1_std * n01(rng);
}

void WorldModel::check(const Vec& v, int dim, const char* what) const {
  if (v.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " has size " + std::to_string(v.size()) + ", expected " + std::to_string(dim));
  }
}

Vec WorldModel::input(const Vec& o, const Vec& e, const Vec& a) const {
  check(o, shape_.dim_visual, "visual embedding");
  check(e, shape_.dim_text, "text embedding");
  check(a, shape_.action_dim, "action encoding");
  Vec x(shape_.input_dim());
  x << o, e, a;
  return x;
}

Vec WorldModel::raw(const Vec& x) const {
  const int in = shape_.input_dim();
  const int hid = shape_.hidden;
  const int out = shape_.output_dim();
  const double* p = theta_.data();
  Eigen::Map<const Mat> W1(p, hid, in);
  Eigen::Map<const Vec> b1(p + hid * in, hid);
  Eigen::Map<const Mat> W2(p + hid * in + hid, out, hid);
  Eigen::Map<const Vec> b2(p + hid * in + hid + out * hid, out);
  const Vec h = (W1 * x + b1).array().tanh();
  return W2 * h + b2;
}

Prediction WorldModel::predict(const Vec& o, const Vec& e, const Vec& a) const {
  const Vec y = raw(input(o, e, a)).cwiseMax(0.0);
  Prediction p{y.head(shape_.dim_visual), y.tail(shape_.dim_text)};
  normalize(p.o);
  normalize(p.e);
  return p;
}

double WorldModel::loss(const std::vector<const WmExample*>& batch, Vec* grad) const {
  if (batch.empty()) throw Error(ErrorCode::EmptyBuffer, "world model loss over an empty batch");
  const int in = shape_.input_dim();
  const int hid = shape_.hidden;
  const int out = shape_.output_dim();
  const double* p = theta_.data();
  Eigen::Map<const Mat> W1(p, hid, in);
  Eigen::Map<const Vec> b1(p + hid * in, hid);
  Eigen::Map<const Mat> W2(p + hid * in + hid, out, hid);
  Eigen::Map<const Vec> b2(p + hid * in + hid + out * hid, out);

  if (grad && grad->size() != theta_.size()) *grad = Vec::Zero(theta_.size());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const WmExample* ex : batch) {
    const Vec x = input(ex->o, ex->e, ex->a);
    check(ex->o_next, shape_.dim_visual, "next visual embedding");
    check(ex->e_next, shape_.dim_text, "next text embedding");
    Vec target(out);
    target << ex->o_next, ex->e_next;
    const Vec h = (W1 * x + b1).array().tanh();
    const Vec diff = W2 * h + b2 - target;
    total += diff.squaredNorm();
    if (!grad) continue;

    double* g = grad->data();
    Eigen::Map<Mat> gW1(g, hid, in);
    Eigen::Map<Vec> gb1(g + hid * in, hid);
    Eigen::Map<Mat> gW2(g + hid * in + hid, out, hid);
    Eigen::Map<Vec> gb2(g + hid * in + hid + out * hid, out);
    const Vec dz = 2.0 * inv_n * diff;
    gW2.noalias() += dz * h.transpose();
    gb2 += dz;
    const Vec dpre = (W2.transpose() * dz).array() * (1.0 - h.array().square());
    gW1.noalias() += dpre * x.transpose();
    gb1 += dpre;
  }
  return total * inv_n;
}

double WorldModel::loss(const std::vector<WmExample>& data) const {
  std::vector<const WmExample*> all;
  for (const auto& d : data) all.push_back(&d);
  return loss(all, nullptr);
}

std::vector<double> WorldModel::train_epochs(const std::vector<WmExample>& data, int epochs, double lr,
                                             int batch_size, double max_grad_norm, std::mt19937_64& rng) {
  if (data.empty()) throw Error(ErrorCode::EmptyBuffer, "world model training needs at least one transition");
  if (batch_size <= 0) throw Error(ErrorCode::ConfigInvalid, "world model batch size must be positive");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> epoch_loss;
  for (int ep = 0; ep < epochs; ++ep) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
      std::vector<const WmExample*> batch;
      for (std::size_t i = start; i < stop; ++i) batch.push_back(&data[order[i]]);
      Vec grad = Vec::Zero(theta_.size());
      sum += loss(batch, &grad);
      ++batches;
      clip_grad_norm(grad, max_grad_norm);
      theta_ -= lr * grad;
      ++steps_;
    }
    epoch_loss.push_back(sum / batches);
  }
  if (!theta_.allFinite()) throw Error(ErrorCode::NonFinite, "world model parameters became non-finite");
  return epoch_loss;
}

std::pair<double, double> curiosity(const Vec& o_next, const Vec& o_hat, const Vec& e_next, const Vec& e_hat) {
  return {1.0 - cosine(o_next, o_hat), 1.0 - cosine(e_next, e_hat)};
}

}  // namespace deskrl
