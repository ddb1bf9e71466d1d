#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kinoplan/learn/network.hpp"
#include "kinoplan/random.hpp"

namespace kinoplan::learn {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 64;
    std::size_t epochs = 20;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    bool shuffle = true;

    void validate() const {
        if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
        if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
    }
};

class Adam {
public:
    Adam(std::size_t n, const TrainConfig& cfg) : m_(n, 0.0), v_(n, 0.0), cfg_(cfg) {}

    void step(std::vector<double>& theta, const std::vector<double>& grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            theta[i] -= cfg_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.epsilon);
        }
    }

private:
    std::vector<double> m_, v_;
    TrainConfig cfg_;
    std::uint64_t t_ = 0;
};

struct TrainResult {
    ModelParams model;
    std::vector<double> epoch_loss;  // mean pre-update minibatch loss per epoch
    double final_loss = 0.0;         // full-dataset loss after training
};

// Mini-batch Adam from a seeded fan-in initialization. `on_epoch`, when set,
// receives (epoch, mean loss) after every epoch.
inline TrainResult train(std::span<const Example> data, const Architecture& arch, const TrainConfig& cfg,
                         const std::function<void(std::size_t, double)>& on_epoch = {}) {
    if (data.empty()) throw std::invalid_argument("train: empty dataset");
    cfg.validate();
    TrainResult r{init_model(arch, cfg.seed), {}, 0.0};
    Adam opt(r.model.size(), cfg);
    Rng rng(mix_seed(cfg.seed, 0x7261696eULL));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(r.model.size());
    std::vector<Example> batch;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle)
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
        double sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i)
                batch.push_back(data[order[i]]);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double l = backward(r.model, batch, grad);
            if (!std::isfinite(l)) {
                std::ostringstream msg;
                msg << "train: non-finite loss at epoch " << epoch << ", batch " << batches
                    << " (learning rate " << cfg.learning_rate << ")";
                throw std::runtime_error(msg.str());
            }
            sum += l;
            ++batches;
            opt.step(r.model.theta, grad);
        }
        r.epoch_loss.push_back(sum / static_cast<double>(batches));
        if (on_epoch) on_epoch(epoch, r.epoch_loss.back());
    }
    // Stored models hold 32-bit floats; round now so the in-memory model and
    // its saved form agree exactly.
    for (auto& v : r.model.theta) v = static_cast<double>(static_cast<float>(v));
    r.final_loss = batch_loss(r.model, data);
    return r;
}

}  // namespace kinoplan::learn
