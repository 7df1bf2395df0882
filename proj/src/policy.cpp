#include "deskrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace deskrl {

namespace {

// Log-softmax of z / tau over the first n entries.
Vec log_softmax(const Eigen::Ref<const Vec>& z, int n, double tau) {
  Vec s = z.head(n) / tau;
  const double m = s.maxCoeff();
  const double lse = m + std::log((s.array() - m).exp().sum());
  return s.array() - lse;
}

}  // namespace

int PolicyShape::output_dim() const {
  int n = 0;
  for (int h : heads) n += h;
  return n;
}

int PolicyShape::head_offset(int head) const {
  int off = 0;
  for (int i = 0; i < head; ++i) off += heads[static_cast<std::size_t>(i)];
  return off;
}

std::size_t PolicyShape::num_params() const {
  const auto in = static_cast<std::size_t>(input_dim);
  const auto hid = static_cast<std::size_t>(hidden);
  const auto out = static_cast<std::size_t>(output_dim());
  return hid * in + hid + out * hid + out;
}

int CompositeAction::choice(int head) const {
  switch (head) {
    case kHeadKind: return kind;
    case kHeadCellX: return cx;
    case kHeadCellY: return cy;
    case kHeadPayload: return payload;
    case kHeadIntent: return intent;
    case kHeadSlot: return slot;
  }
  throw Error(ErrorCode::IndexOutOfRange, "no head " + std::to_string(head));
}

void CompositeAction::set_choice(int head, int value) {
  switch (head) {
    case kHeadKind: kind = value; return;
    case kHeadCellX: cx = value; return;
    case kHeadCellY: cy = value; return;
    case kHeadPayload: payload = value; return;
    case kHeadIntent: intent = value; return;
    case kHeadSlot: slot = value; return;
  }
  throw Error(ErrorCode::IndexOutOfRange, "no head " + std::to_string(head));
}

Policy::Policy(PolicyShape shape) : shape_(shape), theta_(Vec::Zero(static_cast<Eigen::Index>(shape.num_params()))) {
  for (int h : shape_.heads) {
    if (h <= 0) throw Error(ErrorCode::ShapeMismatch, "policy head sizes must be positive");
  }
  if (shape_.input_dim <= 0 || shape_.hidden <= 0) throw Error(ErrorCode::ShapeMismatch, "policy dims must be positive");
}

Policy::Policy(PolicyShape shape, std::uint64_t init_seed, double w1_std, double w2_std) : Policy(shape) {
  std::mt19937_64 rng(init_seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const Eigen::Index w1 = static_cast<Eigen::Index>(shape_.hidden) * shape_.input_dim;
  const Eigen::Index w2_off = w1 + shape_.hidden;
  const Eigen::Index w2 = static_cast<Eigen::Index>(shape_.output_dim()) * shape_.hidden;
  for (Eigen::Index i = 0; i < w1; ++i) theta_[i] = w1_std * n01(rng);
  for (Eigen::Index i = 0; i < w2; ++i) theta_[w2_off + i] = w2_std * n01(rng);
}

void Policy::check_input(const Vec& x) const {
  if (x.size() != shape_.input_dim) {
    throw Error(ErrorCode::ShapeMismatch, "policy input has " + std::to_string(x.size()) + " features, expected " +
                                              std::to_string(shape_.input_dim));
  }
}

Policy::Forward Policy::forward(const Vec& x) const {
  check_input(x);
  const int in = shape_.input_dim;
  const int hid = shape_.hidden;
  const int out = shape_.output_dim();
  const double* p = theta_.data();
  Eigen::Map<const Mat> W1(p, hid, in);
  Eigen::Map<const Vec> b1(p + hid * in, hid);
  Eigen::Map<const Mat> W2(p + hid * in + hid, out, hid);
  Eigen::Map<const Vec> b2(p + hid * in + hid + out * hid, out);
  Forward f;
  f.pre = W1 * x + b1;
  f.h = f.pre.array().tanh();
  f.z = W2 * f.h + b2;
  return f;
}

Vec Policy::logits(const Vec& x) const { return forward(x).z; }

int Policy::slot_limit(int num_boxes) const {
  return std::min(num_boxes, shape_.heads[kHeadSlot]);
}

double Policy::log_prob(const Vec& x, int num_boxes, const CompositeAction& a, double tau) const {
  Vec g;
  return log_prob_grad(x, num_boxes, a, tau, 0.0, g);
}

double Policy::log_prob_grad(const Vec& x, int num_boxes, const CompositeAction& a, double tau, double scale,
                             Vec& grad) const {
  const auto f = forward(x);
  const bool want_grad = scale != 0.0;
  Vec dz;
  if (want_grad) dz = Vec::Zero(f.z.size());

  double lp = 0.0;
  for (int head = 0; head < kNumHeads; ++head) {
    int n = shape_.heads[static_cast<std::size_t>(head)];
    if (head == kHeadSlot) {
      n = slot_limit(num_boxes);
      if (n == 0) continue;
    }
    const int c = a.choice(head);
    if (c < 0 || c >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "choice " + std::to_string(c) + " outside head " +
                                                  std::to_string(head) + " of size " + std::to_string(n));
    }
    const int off = shape_.head_offset(head);
    const Vec ls = log_softmax(f.z.segment(off, shape_.heads[static_cast<std::size_t>(head)]), n, tau);
    lp += ls[c];
    if (want_grad) {
      // d log p_c / d z_k = (1[k=c] - p_k) / tau
      Vec d = -ls.array().exp();
      d[c] += 1.0;
      dz.segment(off, n) = d / tau;
    }
  }
  if (!want_grad) return lp;

  if (grad.size() != theta_.size()) grad = Vec::Zero(theta_.size());
  const int in = shape_.input_dim;
  const int hid = shape_.hidden;
  const int out = shape_.output_dim();
  double* g = grad.data();
  Eigen::Map<Mat> gW1(g, hid, in);
  Eigen::Map<Vec> gb1(g + hid * in, hid);
  Eigen::Map<Mat> gW2(g + hid * in + hid, out, hid);
  Eigen::Map<Vec> gb2(g + hid * in + hid + out * hid, out);
  Eigen::Map<const Mat> W2(theta_.data() + hid * in + hid, out, hid);

  dz *= scale;
  gW2.noalias() += dz * f.h.transpose();
  gb2 += dz;
  const Vec dpre = (W2.transpose() * dz).array() * (1.0 - f.h.array().square());
  gW1.noalias() += dpre * x.transpose();
  gb1 += dpre;
  return lp;
}

double Policy::batch_log_prob(const Mat& X, const std::vector<int>& num_boxes,
                              const std::vector<CompositeAction>& actions, double tau, const Vec& weights,
                              Vec* grad) const {
  const auto n = X.cols();
  if (X.rows() != shape_.input_dim) throw Error(ErrorCode::ShapeMismatch, "batch features have the wrong size");
  if (static_cast<std::size_t>(n) != num_boxes.size() || static_cast<std::size_t>(n) != actions.size() ||
      weights.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "batch arrays differ in length");
  }
  const int in = shape_.input_dim;
  const int hid = shape_.hidden;
  const int out = shape_.output_dim();
  const double* p = theta_.data();
  Eigen::Map<const Mat> W1(p, hid, in);
  Eigen::Map<const Vec> b1(p + hid * in, hid);
  Eigen::Map<const Mat> W2(p + hid * in + hid, out, hid);
  Eigen::Map<const Vec> b2(p + hid * in + hid + out * hid, out);

  const Mat Hm = ((W1 * X).colwise() + b1).array().tanh();
  const Mat Z = (W2 * Hm).colwise() + b2;
  Mat dZ = grad ? Mat::Zero(out, n) : Mat();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = actions[static_cast<std::size_t>(i)];
    for (int head = 0; head < kNumHeads; ++head) {
      const int size = shape_.heads[static_cast<std::size_t>(head)];
      const int m = head == kHeadSlot ? slot_limit(num_boxes[static_cast<std::size_t>(i)]) : size;
      if (m == 0) continue;
      const int c = a.choice(head);
      if (c < 0 || c >= m) throw Error(ErrorCode::IndexOutOfRange, "batch choice outside its head");
      const int off = shape_.head_offset(head);
      const Vec ls = log_softmax(Z.col(i).segment(off, size), m, tau);
      total += weights[i] * ls[c];
      if (grad) {
        Vec d = -ls.array().exp();
        d[c] += 1.0;
        dZ.col(i).segment(off, m) = weights[i] * d / tau;
      }
    }
  }
  if (!grad) return total;

  if (grad->size() != theta_.size()) *grad = Vec::Zero(theta_.size());
  double* g = grad->data();
  Eigen::Map<Mat> gW1(g, hid, in);
  Eigen::Map<Vec> gb1(g + hid * in, hid);
  Eigen::Map<Mat> gW2(g + hid * in + hid, out, hid);
  Eigen::Map<Vec> gb2(g + hid * in + hid + out * hid, out);
  gW2.noalias() += dZ * Hm.transpose();
  gb2 += dZ.rowwise().sum();
  const Mat dPre = (W2.transpose() * dZ).array() * (1.0 - Hm.array().square());
  gW1.noalias() += dPre * X.transpose();
  gb1 += dPre.rowwise().sum();
  return total;
}

std::array<Vec, kNumHeads> Policy::head_probs(const Vec& x, int num_boxes, double tau) const {
  const auto f = forward(x);
  std::array<Vec, kNumHeads> out;
  for (int head = 0; head < kNumHeads; ++head) {
    const int size = shape_.heads[static_cast<std::size_t>(head)];
    const int n = head == kHeadSlot ? slot_limit(num_boxes) : size;
    Vec p = Vec::Zero(size);
    if (n > 0) p.head(n) = log_softmax(f.z.segment(shape_.head_offset(head), size), n, tau).array().exp();
    out[static_cast<std::size_t>(head)] = std::move(p);
  }
  return out;
}

CompositeAction Policy::sample(const Vec& x, int num_boxes, double tau, std::mt19937_64& rng, double* logp) const {
  const auto probs = head_probs(x, num_boxes, tau);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  CompositeAction a;
  double lp = 0.0;
  for (int head = 0; head < kNumHeads; ++head) {
    const Vec& p = probs[static_cast<std::size_t>(head)];
    const int n = head == kHeadSlot ? slot_limit(num_boxes) : static_cast<int>(p.size());
    const double r = u01(rng);  // always drawn so the stream stays aligned
    if (n == 0) {
      a.set_choice(head, -1);
      continue;
    }
    int c = n - 1;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += p[k];
      if (r < acc) {
        c = k;
        break;
      }
    }
    a.set_choice(head, c);
    lp += std::log(p[c]);
  }
  if (logp) *logp = lp;
  return a;
}

CompositeAction Policy::argmax(const Vec& x, int num_boxes) const {
  const auto f = forward(x);
  CompositeAction a;
  for (int head = 0; head < kNumHeads; ++head) {
    const int size = shape_.heads[static_cast<std::size_t>(head)];
    const int n = head == kHeadSlot ? slot_limit(num_boxes) : size;
    if (n == 0) {
      a.set_choice(head, -1);
      continue;
    }
    Eigen::Index best = 0;
    f.z.segment(shape_.head_offset(head), n).maxCoeff(&best);
    a.set_choice(head, static_cast<int>(best));
  }
  return a;
}

void AdamState::ascend(Vec& params, const Vec& grad, double lr) {
  if (m.size() != params.size()) {
    m = Vec::Zero(params.size());
    v = Vec::Zero(params.size());
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.array().square().matrix();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() += lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

double clip_grad_norm(Vec& grad, double max_norm) {
  const double n = grad.norm();
  if (max_norm > 0 && n > max_norm) grad *= max_norm / n;
  return n;
}

}  // namespace deskrl
