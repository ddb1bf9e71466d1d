#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinoplan/random.hpp"

namespace kinoplan::learn {

inline constexpr int kStateFeatures = 4;
inline constexpr int kManeuverDims = 3;  // a_left, a_right, duration (normalized)

using Row = std::array<double, kManeuverDims>;

// Layer widths of the maneuver network. Encoders F_x, F_o, F_h each have one
// hidden ReLU layer; head k has one hidden ReLU layer and a 3-wide output.
// Head 0 sees [x*, o*, h*]; head k >= 1 sees [x*, o*, u^0 .. u^{k-1}].
struct Architecture {
    int grid = 32;
    int exploratory = 4;  // N; the network emits N + 1 rows
    int x_hidden = 32;
    int x_out = 16;
    int o_hidden = 64;
    int o_out = 32;
    int h_hidden = 64;
    int h_out = 32;
    int head_hidden = 64;

    int rows() const { return exploratory + 1; }
    int cells() const { return grid * grid; }
    int head_input(int k) const { return k == 0 ? x_out + o_out + h_out : x_out + o_out + kManeuverDims * k; }

    void validate() const {
        if (grid < 2 || exploratory < 0 || x_hidden < 1 || x_out < 1 || o_hidden < 1 || o_out < 1 ||
            h_hidden < 1 || h_out < 1 || head_hidden < 1)
            throw std::invalid_argument("invalid network architecture");
    }

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

// Parameter block of a one-hidden-layer perceptron inside the flat vector:
// W1 (hidden x in, row-major), b1, W2 (out x hidden), b2.
struct MlpLayout {
    int in = 0;
    int hidden = 0;
    int out = 0;
    std::size_t offset = 0;

    std::size_t w1() const { return offset; }
    std::size_t b1() const { return w1() + static_cast<std::size_t>(hidden * in); }
    std::size_t w2() const { return b1() + static_cast<std::size_t>(hidden); }
    std::size_t b2() const { return w2() + static_cast<std::size_t>(out * hidden); }
    std::size_t size() const { return static_cast<std::size_t>(hidden * in + hidden + out * hidden + out); }
};

struct Layouts {
    MlpLayout fx, fo, fh;
    std::vector<MlpLayout> heads;
    std::size_t total = 0;
};

// Flat parameter order: F_x, F_o, F_h, F^0 .. F^N.
inline Layouts make_layouts(const Architecture& a) {
    Layouts l;
    std::size_t off = 0;
    auto place = [&off](int in, int hidden, int out) {
        MlpLayout m{in, hidden, out, off};
        off += m.size();
        return m;
    };
    l.fx = place(kStateFeatures, a.x_hidden, a.x_out);
    l.fo = place(a.cells(), a.o_hidden, a.o_out);
    l.fh = place(a.cells(), a.h_hidden, a.h_out);
    for (int k = 0; k < a.rows(); ++k) l.heads.push_back(place(a.head_input(k), a.head_hidden, kManeuverDims));
    l.total = off;
    return l;
}

struct ModelParams {
    Architecture arch;
    Layouts layout;
    std::vector<double> theta;

    ModelParams() : ModelParams(Architecture{}) {}
    explicit ModelParams(const Architecture& a) : arch(a), layout(make_layouts(a)), theta(layout.total, 0.0) {
        a.validate();
    }

    std::size_t size() const { return theta.size(); }
};

// Weights uniform in +-1/sqrt(fan_in), biases zero.
inline ModelParams init_model(const Architecture& a, std::uint64_t seed) {
    ModelParams m(a);
    Rng rng(seed);
    auto fill = [&](const MlpLayout& l) {
        const double s1 = 1.0 / std::sqrt(static_cast<double>(l.in));
        for (std::size_t i = l.w1(); i < l.b1(); ++i) m.theta[i] = rng.uniform(-s1, s1);
        const double s2 = 1.0 / std::sqrt(static_cast<double>(l.hidden));
        for (std::size_t i = l.w2(); i < l.b2(); ++i) m.theta[i] = rng.uniform(-s2, s2);
    };
    fill(m.layout.fx);
    fill(m.layout.fo);
    fill(m.layout.fh);
    for (const auto& h : m.layout.heads) fill(h);
    return m;
}

// Network inputs as stored in dataset records.
struct ModelInput {
    std::span<const float> features;   // 4
    std::span<const float> occupancy;  // G*G
    std::span<const float> heuristic;  // G*G
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace detail {

struct MlpCache {
    std::vector<double> pre;     // hidden pre-activations
    std::vector<double> hidden;  // ReLU(pre)
    std::vector<double> out;
};

template <typename T>
void mlp_forward(const std::vector<double>& theta, const MlpLayout& l, std::span<const T> in, MlpCache& c) {
    c.pre.assign(static_cast<std::size_t>(l.hidden), 0.0);
    c.hidden.resize(static_cast<std::size_t>(l.hidden));
    c.out.resize(static_cast<std::size_t>(l.out));
    const double* b1 = theta.data() + l.b1();
    for (int j = 0; j < l.hidden; ++j) c.pre[static_cast<std::size_t>(j)] = b1[j];
    // Row-major W1: each hidden unit is one contiguous dot product.
    const double* w1 = theta.data() + l.w1();
    for (int j = 0; j < l.hidden; ++j) {
        const double* row = w1 + static_cast<std::ptrdiff_t>(j) * l.in;
        double acc = 0.0;
        for (int i = 0; i < l.in; ++i) acc += row[i] * static_cast<double>(in[static_cast<std::size_t>(i)]);
        c.pre[static_cast<std::size_t>(j)] += acc;
    }
    for (int j = 0; j < l.hidden; ++j) {
        const double p = c.pre[static_cast<std::size_t>(j)];
        c.hidden[static_cast<std::size_t>(j)] = p > 0.0 ? p : 0.0;
    }
    const double* w2 = theta.data() + l.w2();
    const double* b2 = theta.data() + l.b2();
    for (int o = 0; o < l.out; ++o) {
        double acc = b2[o];
        for (int j = 0; j < l.hidden; ++j) acc += w2[o * l.hidden + j] * c.hidden[static_cast<std::size_t>(j)];
        c.out[static_cast<std::size_t>(o)] = acc;
    }
}

// Accumulates parameter gradients into `grad` and, when `din` is non-empty,
// the input gradient into `din`.
template <typename T>
void mlp_backward(const std::vector<double>& theta, const MlpLayout& l, std::span<const T> in, const MlpCache& c,
                  std::span<const double> dout, std::vector<double>& grad, std::span<double> din) {
    std::vector<double> dpre(static_cast<std::size_t>(l.hidden), 0.0);
    const double* w2 = theta.data() + l.w2();
    double* gw2 = grad.data() + l.w2();
    double* gb2 = grad.data() + l.b2();
    for (int o = 0; o < l.out; ++o) {
        const double d = dout[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        gb2[o] += d;
        for (int j = 0; j < l.hidden; ++j) {
            gw2[o * l.hidden + j] += d * c.hidden[static_cast<std::size_t>(j)];
            dpre[static_cast<std::size_t>(j)] += d * w2[o * l.hidden + j];
        }
    }
    for (int j = 0; j < l.hidden; ++j)
        if (!(c.pre[static_cast<std::size_t>(j)] > 0.0)) dpre[static_cast<std::size_t>(j)] = 0.0;
    double* gb1 = grad.data() + l.b1();
    double* gw1 = grad.data() + l.w1();
    const double* w1 = theta.data() + l.w1();
    for (int j = 0; j < l.hidden; ++j) gb1[j] += dpre[static_cast<std::size_t>(j)];
    // Dead ReLU units contribute nothing below them.
    for (int j = 0; j < l.hidden; ++j) {
        const double d = dpre[static_cast<std::size_t>(j)];
        if (d == 0.0) continue;
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(j) * l.in;
        for (int i = 0; i < l.in; ++i) gw1[row + i] += d * static_cast<double>(in[static_cast<std::size_t>(i)]);
        if (!din.empty())
            for (int i = 0; i < l.in; ++i) din[static_cast<std::size_t>(i)] += w1[row + i] * d;
    }
}

}  // namespace detail

// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardCache {
    detail::MlpCache fx, fo, fh;
    std::vector<std::vector<double>> head_inputs;
    std::vector<detail::MlpCache> heads;
    std::vector<Row> rows;  // squashed outputs
};

inline void forward(const ModelParams& m, const ModelInput& in, ForwardCache& c) {
    const auto& a = m.arch;
    if (in.features.size() != static_cast<std::size_t>(kStateFeatures) ||
        in.occupancy.size() != static_cast<std::size_t>(a.cells()) ||
        in.heuristic.size() != static_cast<std::size_t>(a.cells()) || m.theta.size() != m.layout.total)
        throw std::invalid_argument("forward: input or parameter dimensions do not match the model");
    const auto& L = m.layout;
    detail::mlp_forward(m.theta, L.fx, in.features, c.fx);
    detail::mlp_forward(m.theta, L.fo, in.occupancy, c.fo);
    detail::mlp_forward(m.theta, L.fh, in.heuristic, c.fh);

    const int rows = a.rows();
    c.head_inputs.resize(static_cast<std::size_t>(rows));
    c.heads.resize(static_cast<std::size_t>(rows));
    c.rows.resize(static_cast<std::size_t>(rows));
    for (int k = 0; k < rows; ++k) {
        auto& x = c.head_inputs[static_cast<std::size_t>(k)];
        x.clear();
        x.insert(x.end(), c.fx.out.begin(), c.fx.out.end());
        x.insert(x.end(), c.fo.out.begin(), c.fo.out.end());
        if (k == 0) {
            x.insert(x.end(), c.fh.out.begin(), c.fh.out.end());
        } else {
            for (int j = 0; j < k; ++j) {
                const auto& r = c.rows[static_cast<std::size_t>(j)];
                x.insert(x.end(), r.begin(), r.end());
            }
        }
        auto& hc = c.heads[static_cast<std::size_t>(k)];
        detail::mlp_forward(m.theta, L.heads[static_cast<std::size_t>(k)], std::span<const double>(x), hc);
        c.rows[static_cast<std::size_t>(k)] = {std::tanh(hc.out[0]), std::tanh(hc.out[1]), sigmoid(hc.out[2])};
    }
}

inline std::vector<Row> forward(const ModelParams& m, const ModelInput& in) {
    ForwardCache c;
    forward(m, in, c);
    return c.rows;
}

// Mean squared error over the first `valid` rows (masked rows ignored).
inline double loss(std::span<const Row> pred, std::span<const float> target, int valid) {
    if (valid <= 0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k < valid; ++k)
        for (int d = 0; d < kManeuverDims; ++d) {
            const double e = pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] -
                             static_cast<double>(target[static_cast<std::size_t>(k * kManeuverDims + d)]);
            acc += e * e;
        }
    return acc / static_cast<double>(valid * kManeuverDims);
}

struct Example {
    ModelInput input;
    std::span<const float> target;  // (N+1) x 3
    int valid = 1;
};

// Mean batch loss; gradients of that mean are added into `grad`.
inline double backward(const ModelParams& m, std::span<const Example> batch, std::vector<double>& grad) {
    if (batch.empty()) throw std::invalid_argument("backward: empty batch");
    grad.resize(m.theta.size(), 0.0);
    const auto& a = m.arch;
    const auto& L = m.layout;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const int rows = a.rows();
    ForwardCache c;
    double total = 0.0;
    for (const auto& ex : batch) {
        forward(m, ex.input, c);
        total += loss(c.rows, ex.target, ex.valid);

        std::vector<Row> d_rows(static_cast<std::size_t>(rows), Row{0, 0, 0});
        const double scale = 2.0 * inv_b / static_cast<double>(ex.valid * kManeuverDims);
        for (int k = 0; k < ex.valid; ++k)
            for (int d = 0; d < kManeuverDims; ++d)
                d_rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] =
                    scale * (c.rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] -
                             static_cast<double>(ex.target[static_cast<std::size_t>(k * kManeuverDims + d)]));

        std::vector<double> dx(static_cast<std::size_t>(a.x_out), 0.0);
        std::vector<double> dobs(static_cast<std::size_t>(a.o_out), 0.0);
        std::vector<double> dh(static_cast<std::size_t>(a.h_out), 0.0);
        // Later heads feed gradient back into earlier rows, so walk backwards.
        for (int k = rows - 1; k >= 0; --k) {
            const auto& r = c.rows[static_cast<std::size_t>(k)];
            const auto& du = d_rows[static_cast<std::size_t>(k)];
            if (du[0] == 0.0 && du[1] == 0.0 && du[2] == 0.0) continue;
            const std::array<double, kManeuverDims> dy{du[0] * (1.0 - r[0] * r[0]), du[1] * (1.0 - r[1] * r[1]),
                                                       du[2] * r[2] * (1.0 - r[2])};
            const auto& hl = L.heads[static_cast<std::size_t>(k)];
            std::vector<double> din(static_cast<std::size_t>(hl.in), 0.0);
            const auto& x = c.head_inputs[static_cast<std::size_t>(k)];
            detail::mlp_backward(m.theta, hl, std::span<const double>(x), c.heads[static_cast<std::size_t>(k)], dy,
                                 grad, din);
            std::size_t pos = 0;
            for (int i = 0; i < a.x_out; ++i) dx[static_cast<std::size_t>(i)] += din[pos++];
            for (int i = 0; i < a.o_out; ++i) dobs[static_cast<std::size_t>(i)] += din[pos++];
            if (k == 0) {
                for (int i = 0; i < a.h_out; ++i) dh[static_cast<std::size_t>(i)] += din[pos++];
            } else {
                for (int j = 0; j < k; ++j)
                    for (int d = 0; d < kManeuverDims; ++d)
                        d_rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] += din[pos++];
            }
        }
        detail::mlp_backward(m.theta, L.fx, ex.input.features, c.fx, dx, grad, {});
        detail::mlp_backward(m.theta, L.fo, ex.input.occupancy, c.fo, dobs, grad, {});
        detail::mlp_backward(m.theta, L.fh, ex.input.heuristic, c.fh, dh, grad, {});
    }
    return total * inv_b;
}

inline double batch_loss(const ModelParams& m, std::span<const Example> batch) {
    double total = 0.0;
    ForwardCache c;
    for (const auto& ex : batch) {
        forward(m, ex.input, c);
        total += loss(c.rows, ex.target, ex.valid);
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace kinoplan::learn
