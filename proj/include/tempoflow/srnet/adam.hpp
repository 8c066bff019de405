#pragma once

#include <cmath>
#include <vector>

#include "tempoflow/srnet/network.hpp"

namespace tempoflow {

struct AdamConfig {
    double lr = 2e-4;
    double lr_decay = 1.0;  ///< per-epoch multiplicative decay, 1 = constant
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t batch_size = 32;
    std::size_t epochs = 160;
};

/// Learning rate in effect during `epoch`.
inline double epoch_lr(const AdamConfig& cfg, std::size_t epoch) {
    return cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch));
}

template <typename T>
struct AdamStateT {
    std::vector<NdArray<T>> m;  // first moments, tensor order = for_each_tensor
    std::vector<NdArray<T>> v;  // second moments
    std::size_t step = 0;

    static AdamStateT init(const NetworkParamsT<T>& params) {
        AdamStateT s;
        params.for_each_tensor([&](const std::string&, const NdArray<T>& t, bool) {
            NdArray<T> z(t.shape());
            z.fill(T(0));
            s.m.push_back(z);
            s.v.push_back(std::move(z));
        });
        return s;
    }
};

using AdamState = AdamStateT<float>;

/// One bias-corrected Adam update; moments are updated in double and stored
/// back at parameter precision.
template <typename T>
void adam_step(AdamStateT<T>& state, NetworkParamsT<T>& params, const NetworkParamsT<T>& grads,
               const AdamConfig& cfg) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

    std::size_t slot = 0;
    std::vector<const NdArray<T>*> grad_list;
    grads.for_each_tensor(
        [&](const std::string&, const NdArray<T>& g, bool) { grad_list.push_back(&g); });

    params.for_each_tensor([&](const std::string& name, NdArray<T>& t, bool) {
        const NdArray<T>& g = *grad_list[slot];
        NdArray<T>& m = state.m[slot];
        NdArray<T>& v = state.v[slot];
        ++slot;
        require(g.size() == t.size(), "adam_step: gradient shape mismatch for " + name);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double gi = g[i];
            const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double mhat = mi / bc1;
            const double vhat = vi / bc2;
            t[i] = static_cast<T>(t[i] - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    });
}

} // namespace tempoflow
