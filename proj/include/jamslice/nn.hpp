#pragma once

// Small dense networks with hand-written backward passes: a stacked LSTM
// regressor for Q-values and a sigmoid/softmax feedforward classifier.

#include "jamslice/rng.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace jamslice {

using Vec = std::vector<double>;
using Sequence = std::vector<Vec>;

struct NamedTensor {
    std::string name;
    std::vector<int> shape;
    std::span<double> data;
};

/// Text checkpoint: a header line, then per tensor `tensor <name> <rank> <dims...>`
/// followed by the values, one per line, in row-major order.
void write_tensors(std::ostream& os, const std::vector<NamedTensor>& tensors);
/// Reads tensors written by write_tensors into pre-shaped buffers; shapes must match.
void read_tensors(std::istream& is, const std::vector<NamedTensor>& tensors);

/// Clips `grad` to an L2 norm of at most `max_norm` and applies `params -= lr * grad`.
void sgd_step(std::span<double> params, std::span<double> grad, double lr, double max_norm);

struct LstmShape {
    int input = 1;
    int hidden = 20;
    int layers = 1;
    int output = 13;
    bool operator==(const LstmShape&) const = default;
};

/// Stacked LSTM; the last layer's final hidden state feeds a linear head.
/// Gate order inside each weight block is input, forget, cell, output.
class LstmNet {
public:
    LstmNet() = default;
    explicit LstmNet(LstmShape shape);

    const LstmShape& shape() const { return shape_; }

    void init_uniform(Rng& rng, double range);

    Vec forward(const Sequence& seq) const;

    /// Adds d(0.5 * sum_k w_k (y_k - t_k)^2)/dtheta into `grad` and returns
    /// the output vector. `weights` masks which outputs carry a loss.
    Vec accumulate_gradient(const Sequence& seq, std::span<const double> target,
                            std::span<const double> weights, std::span<double> grad) const;

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }

    std::vector<NamedTensor> tensors();

    bool operator==(const LstmNet& o) const { return shape_ == o.shape_ && params_ == o.params_; }

private:
    int layer_input(int l) const { return l == 0 ? shape_.input : shape_.hidden; }
    std::size_t w_offset(int l) const { return offsets_[l]; }
    std::size_t b_offset(int l) const { return offsets_[l] + 4ull * shape_.hidden * (layer_input(l) + shape_.hidden); }
    std::size_t head_w_offset() const { return offsets_.back(); }
    std::size_t head_b_offset() const { return offsets_.back() + static_cast<std::size_t>(shape_.output) * shape_.hidden; }

    struct Trace;
    void run(const Sequence& seq, Trace* trace, Vec& out) const;

    LstmShape shape_;
    std::vector<std::size_t> offsets_;
    Vec params_;
};

/// Fully connected net: sigmoid hidden layers, softmax output.
class FeedForwardNet {
public:
    FeedForwardNet() = default;
    explicit FeedForwardNet(std::vector<int> layer_sizes);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }

    void init_uniform(Rng& rng, double range);

    /// Softmax probabilities.
    Vec forward(std::span<const double> x) const;

    /// Cross-entropy -sum t log p against a target distribution; adds the
    /// gradient into `grad` and returns the loss.
    double accumulate_gradient(std::span<const double> x, std::span<const double> target,
                               std::span<double> grad) const;

    /// One SGD step on a single example; returns the pre-step loss.
    double train(std::span<const double> x, std::span<const double> target, double lr);

    double cross_entropy(std::span<const double> x, std::span<const double> target) const;

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    std::vector<NamedTensor> tensors();

private:
    void run(std::span<const double> x, std::vector<Vec>& acts) const;

    std::vector<int> sizes_;
    std::vector<std::size_t> offsets_;  // weight block start per layer transition
    Vec params_;
};

Vec softmax(std::span<const double> logits);

} // namespace jamslice
