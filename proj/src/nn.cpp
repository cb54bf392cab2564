#include "jamslice/nn.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace jamslice {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr const char* kCheckpointHeader = "jamslice-weights v1";

} // namespace

void write_tensors(std::ostream& os, const std::vector<NamedTensor>& tensors) {
    os << kCheckpointHeader << '\n' << tensors.size() << '\n';
    os << std::setprecision(17);
    for (const auto& t : tensors) {
        os << "tensor " << t.name << ' ' << t.shape.size();
        for (int d : t.shape) os << ' ' << d;
        os << '\n';
        for (double v : t.data) os << v << '\n';
    }
}

void read_tensors(std::istream& is, const std::vector<NamedTensor>& tensors) {
    std::string line;
    std::getline(is, line);
    if (line != kCheckpointHeader) throw ConfigError("checkpoint: bad header '" + line + "'");
    std::size_t count = 0;
    is >> count;
    if (count != tensors.size()) throw ConfigError("checkpoint: tensor count mismatch");
    for (const auto& t : tensors) {
        std::string tag, name;
        std::size_t rank = 0;
        is >> tag >> name >> rank;
        if (tag != "tensor" || name != t.name || rank != t.shape.size())
            throw ConfigError("checkpoint: unexpected tensor header for " + t.name);
        for (int d : t.shape) {
            int got = 0;
            is >> got;
            if (got != d) throw ConfigError("checkpoint: shape mismatch for " + t.name);
        }
        for (double& v : t.data) {
            if (!(is >> v)) throw ConfigError("checkpoint: truncated data for " + t.name);
        }
    }
}

void sgd_step(std::span<double> params, std::span<double> grad, double lr, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    const double scale = (max_norm > 0.0 && norm > max_norm) ? max_norm / norm : 1.0;
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * scale * grad[i];
}

Vec softmax(std::span<const double> logits) {
    Vec p(logits.begin(), logits.end());
    const double m = *std::max_element(p.begin(), p.end());
    double s = 0.0;
    for (double& v : p) {
        v = std::exp(v - m);
        s += v;
    }
    for (double& v : p) v /= s;
    return p;
}

// ---------------------------------------------------------------- LSTM

struct LstmNet::Trace {
    // [layer][t] flattened vectors
    std::vector<std::vector<Vec>> in;    // concat [x; h_prev]
    std::vector<std::vector<Vec>> gate;  // i, f, g, o activations (4h)
    std::vector<std::vector<Vec>> c;     // cell state c_t
    std::vector<std::vector<Vec>> h;     // hidden h_t
};

LstmNet::LstmNet(LstmShape shape) : shape_(shape) {
    if (shape.input < 1 || shape.hidden < 1 || shape.layers < 1 || shape.output < 1)
        throw ConfigError("lstm: all dimensions must be >= 1");
    std::size_t off = 0;
    for (int l = 0; l < shape.layers; ++l) {
        offsets_.push_back(off);
        off += 4ull * shape.hidden * (layer_input(l) + shape.hidden) + 4ull * shape.hidden;
    }
    offsets_.push_back(off);
    off += static_cast<std::size_t>(shape.output) * shape.hidden + shape.output;
    params_.assign(off, 0.0);
}

void LstmNet::init_uniform(Rng& rng, double range) {
    std::uniform_real_distribution<double> d(-range, range);
    for (double& p : params_) p = d(rng);
}

void LstmNet::run(const Sequence& seq, Trace* trace, Vec& out) const {
    if (seq.empty()) throw DomainError("lstm: empty input sequence");
    const int H = shape_.hidden;
    const int T = static_cast<int>(seq.size());
    Sequence layer_in = seq;
    if (trace) {
        trace->in.assign(shape_.layers, {});
        trace->gate.assign(shape_.layers, {});
        trace->c.assign(shape_.layers, {});
        trace->h.assign(shape_.layers, {});
    }
    Vec z(4 * H), v, h(H), c(H);
    for (int l = 0; l < shape_.layers; ++l) {
        const int in = layer_input(l);
        const double* W = params_.data() + w_offset(l);
        const double* b = params_.data() + b_offset(l);
        std::fill(h.begin(), h.end(), 0.0);
        std::fill(c.begin(), c.end(), 0.0);
        Sequence next(T, Vec(H));
        for (int t = 0; t < T; ++t) {
            if (static_cast<int>(layer_in[t].size()) != in)
                throw ConfigError("lstm: input dimension mismatch");
            v.assign(layer_in[t].begin(), layer_in[t].end());
            v.insert(v.end(), h.begin(), h.end());
            const int cols = in + H;
            for (int k = 0; k < 4 * H; ++k) {
                const double* row = W + static_cast<std::size_t>(k) * cols;
                double s = b[k];
                for (int m = 0; m < cols; ++m) s += row[m] * v[m];
                z[k] = s;
            }
            for (int k = 0; k < H; ++k) {
                const double ig = sigmoid(z[k]);
                const double fg = sigmoid(z[H + k]);
                const double gg = std::tanh(z[2 * H + k]);
                const double og = sigmoid(z[3 * H + k]);
                z[k] = ig;
                z[H + k] = fg;
                z[2 * H + k] = gg;
                z[3 * H + k] = og;
                c[k] = fg * c[k] + ig * gg;
                h[k] = og * std::tanh(c[k]);
            }
            next[t] = h;
            if (trace) {
                trace->in[l].push_back(v);
                trace->gate[l].push_back(z);
                trace->c[l].push_back(c);
                trace->h[l].push_back(h);
            }
        }
        layer_in = std::move(next);
    }
    const double* Wy = params_.data() + head_w_offset();
    const double* by = params_.data() + head_b_offset();
    out.assign(shape_.output, 0.0);
    const Vec& top = layer_in.back();
    for (int k = 0; k < shape_.output; ++k) {
        double s = by[k];
        for (int m = 0; m < H; ++m) s += Wy[static_cast<std::size_t>(k) * H + m] * top[m];
        out[k] = s;
    }
}

Vec LstmNet::forward(const Sequence& seq) const {
    Vec out;
    run(seq, nullptr, out);
    return out;
}

Vec LstmNet::accumulate_gradient(const Sequence& seq, std::span<const double> target,
                                 std::span<const double> weights, std::span<double> grad) const {
    if (grad.size() != params_.size()) throw ConfigError("lstm: gradient buffer size mismatch");
    Trace tr;
    Vec y;
    run(seq, &tr, y);
    const int H = shape_.hidden;
    const int T = static_cast<int>(seq.size());
    const int L = shape_.layers;

    Vec dy(shape_.output, 0.0);
    for (int k = 0; k < shape_.output; ++k) dy[k] = weights[k] * (y[k] - target[k]);

    const double* Wy = params_.data() + head_w_offset();
    double* gWy = grad.data() + head_w_offset();
    double* gby = grad.data() + head_b_offset();
    const Vec& top = tr.h[L - 1][T - 1];
    Vec dh_top(H, 0.0);
    for (int k = 0; k < shape_.output; ++k) {
        if (dy[k] == 0.0) continue;
        gby[k] += dy[k];
        for (int m = 0; m < H; ++m) {
            gWy[static_cast<std::size_t>(k) * H + m] += dy[k] * top[m];
            dh_top[m] += Wy[static_cast<std::size_t>(k) * H + m] * dy[k];
        }
    }

    // dh_from_above[t] is the gradient reaching h_t of the current layer from above.
    std::vector<Vec> dh_above(T, Vec(H, 0.0));
    dh_above[T - 1] = dh_top;
    Vec dz(4 * H), dh_next(H), dc_next(H);
    for (int l = L - 1; l >= 0; --l) {
        const int in = layer_input(l);
        const int cols = in + H;
        const double* W = params_.data() + w_offset(l);
        double* gW = grad.data() + w_offset(l);
        double* gb = grad.data() + b_offset(l);
        std::vector<Vec> dx(T, Vec(in, 0.0));
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        std::fill(dc_next.begin(), dc_next.end(), 0.0);
        for (int t = T - 1; t >= 0; --t) {
            const Vec& g = tr.gate[l][t];
            const Vec& c = tr.c[l][t];
            for (int k = 0; k < H; ++k) {
                const double ig = g[k], fg = g[H + k], gg = g[2 * H + k], og = g[3 * H + k];
                const double c_prev = t > 0 ? tr.c[l][t - 1][k] : 0.0;
                const double tc = std::tanh(c[k]);
                const double dh = dh_above[t][k] + dh_next[k];
                const double dc = dc_next[k] + dh * og * (1.0 - tc * tc);
                dz[k] = dc * gg * ig * (1.0 - ig);
                dz[H + k] = dc * c_prev * fg * (1.0 - fg);
                dz[2 * H + k] = dc * ig * (1.0 - gg * gg);
                dz[3 * H + k] = dh * tc * og * (1.0 - og);
                dc_next[k] = dc * fg;
            }
            const Vec& v = tr.in[l][t];
            Vec dv(cols, 0.0);
            for (int k = 0; k < 4 * H; ++k) {
                const double d = dz[k];
                if (d == 0.0) continue;
                gb[k] += d;
                const std::size_t row = static_cast<std::size_t>(k) * cols;
                for (int m = 0; m < cols; ++m) {
                    gW[row + m] += d * v[m];
                    dv[m] += W[row + m] * d;
                }
            }
            for (int m = 0; m < in; ++m) dx[t][m] = dv[m];
            for (int m = 0; m < H; ++m) dh_next[m] = dv[in + m];
        }
        if (l > 0) dh_above = std::move(dx);
    }
    return y;
}

std::vector<NamedTensor> LstmNet::tensors() {
    std::vector<NamedTensor> out;
    const int H = shape_.hidden;
    for (int l = 0; l < shape_.layers; ++l) {
        const int cols = layer_input(l) + H;
        out.push_back({"lstm" + std::to_string(l) + ".W", {4 * H, cols},
                       std::span<double>(params_.data() + w_offset(l), 4ull * H * cols)});
        out.push_back({"lstm" + std::to_string(l) + ".b", {4 * H},
                       std::span<double>(params_.data() + b_offset(l), 4ull * H)});
    }
    out.push_back({"head.W", {shape_.output, H},
                   std::span<double>(params_.data() + head_w_offset(), static_cast<std::size_t>(shape_.output) * H)});
    out.push_back({"head.b", {shape_.output},
                   std::span<double>(params_.data() + head_b_offset(), static_cast<std::size_t>(shape_.output))});
    return out;
}

// ---------------------------------------------------------------- FFN

FeedForwardNet::FeedForwardNet(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw ConfigError("ffn: need at least input and output layers");
    for (int s : sizes_)
        if (s < 1) throw ConfigError("ffn: layer sizes must be >= 1");
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(off);
        off += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
    }
    params_.assign(off, 0.0);
}

void FeedForwardNet::init_uniform(Rng& rng, double range) {
    std::uniform_real_distribution<double> d(-range, range);
    for (double& p : params_) p = d(rng);
}

void FeedForwardNet::run(std::span<const double> x, std::vector<Vec>& acts) const {
    if (static_cast<int>(x.size()) != sizes_.front()) throw ConfigError("ffn: input dimension mismatch");
    acts.assign(sizes_.size(), {});
    acts[0].assign(x.begin(), x.end());
    const std::size_t last = sizes_.size() - 1;
    for (std::size_t l = 0; l < last; ++l) {
        const int n_in = sizes_[l], n_out = sizes_[l + 1];
        const double* W = params_.data() + offsets_[l];
        const double* b = W + static_cast<std::size_t>(n_out) * n_in;
        Vec z(n_out);
        for (int k = 0; k < n_out; ++k) {
            double s = b[k];
            const double* row = W + static_cast<std::size_t>(k) * n_in;
            for (int m = 0; m < n_in; ++m) s += row[m] * acts[l][m];
            z[k] = s;
        }
        if (l + 1 == last) {
            acts[l + 1] = softmax(z);
        } else {
            for (double& v : z) v = sigmoid(v);
            acts[l + 1] = std::move(z);
        }
    }
}

Vec FeedForwardNet::forward(std::span<const double> x) const {
    std::vector<Vec> acts;
    run(x, acts);
    return acts.back();
}

double FeedForwardNet::cross_entropy(std::span<const double> x, std::span<const double> target) const {
    const Vec p = forward(x);
    double loss = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (target[k] > 0.0) loss -= target[k] * std::log(std::max(p[k], 1e-300));
    return loss;
}

double FeedForwardNet::accumulate_gradient(std::span<const double> x, std::span<const double> target,
                                           std::span<double> grad) const {
    std::vector<Vec> acts;
    run(x, acts);
    const std::size_t last = sizes_.size() - 1;
    double loss = 0.0;
    Vec delta(sizes_[last]);
    double tsum = 0.0;
    for (double t : target) tsum += t;
    for (int k = 0; k < sizes_[last]; ++k) {
        if (target[k] > 0.0) loss -= target[k] * std::log(std::max(acts[last][k], 1e-300));
        delta[k] = tsum * acts[last][k] - target[k];  // d(-sum t log softmax)/dz
    }
    for (std::size_t l = last; l-- > 0;) {
        const int n_in = sizes_[l], n_out = sizes_[l + 1];
        const double* W = params_.data() + offsets_[l];
        double* gW = grad.data() + offsets_[l];
        double* gb = gW + static_cast<std::size_t>(n_out) * n_in;
        Vec prev(n_in, 0.0);
        for (int k = 0; k < n_out; ++k) {
            gb[k] += delta[k];
            const std::size_t row = static_cast<std::size_t>(k) * n_in;
            for (int m = 0; m < n_in; ++m) {
                gW[row + m] += delta[k] * acts[l][m];
                prev[m] += W[row + m] * delta[k];
            }
        }
        if (l > 0) {
            for (int m = 0; m < n_in; ++m) prev[m] *= acts[l][m] * (1.0 - acts[l][m]);
            delta = std::move(prev);
        }
    }
    return loss;
}

double FeedForwardNet::train(std::span<const double> x, std::span<const double> target, double lr) {
    Vec grad(params_.size(), 0.0);
    const double loss = accumulate_gradient(x, target, grad);
    sgd_step(params_, grad, lr, 0.0);
    return loss;
}

std::vector<NamedTensor> FeedForwardNet::tensors() {
    std::vector<NamedTensor> out;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int n_in = sizes_[l], n_out = sizes_[l + 1];
        double* W = params_.data() + offsets_[l];
        out.push_back({"dense" + std::to_string(l) + ".W", {n_out, n_in},
                       std::span<double>(W, static_cast<std::size_t>(n_out) * n_in)});
        out.push_back({"dense" + std::to_string(l) + ".b", {n_out},
                       std::span<double>(W + static_cast<std::size_t>(n_out) * n_in, static_cast<std::size_t>(n_out))});
    }
    return out;
}

} // namespace jamslice
