#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "tempoflow/core/parallel.hpp"
#include "tempoflow/patch/patch.hpp"
#include "tempoflow/srnet/adam.hpp"
#include "tempoflow/srnet/loss.hpp"
#include "tempoflow/srnet/network.hpp"

namespace tempoflow {

struct EpochStats {
    std::size_t epoch = 0;
    double train_total = 0.0;
    double train_mse_fluid = 0.0;
    double train_mse_nonfluid = 0.0;
    double train_mp = 0.0;
    double val_total = 0.0;
};

struct TrainResult {
    NetworkParams params;       ///< best-validation checkpoint
    NetworkParams final_params; ///< parameters after the last epoch
    std::vector<EpochStats> curve;
    std::size_t best_epoch = 0;
    double best_val = 0.0;
};

namespace detail {

/// Mean data-term gradients over a batch, each sample's contribution computed
/// independently and reduced in index order (thread-count invariant).
inline NetworkParams batch_gradients(const NetworkParams& params, const LossConfig& loss_cfg,
                                     const std::vector<const PatchPair*>& batch,
                                     LossBreakdown& mean_loss) {
    const double wsq = params.weight_sq_norm();
    std::vector<NetworkParams> grads(batch.size());
    std::vector<LossBreakdown> losses(batch.size());

    parallel_for(batch.size(), [&](std::size_t i) {
        const PatchPair& p = *batch[i];
        ForwardTrace<float> tr;
        const NdArray<float> pred = forward(params, p.lr, tr);
        NdArray<float> d_pred(pred.shape());
        losses[i] = velocity_loss(pred, p.hr, p.mask, loss_cfg, wsq, &d_pred);
        grads[i] = backward(params, tr, d_pred);
    });

    NetworkParams acc = std::move(grads[0]);
    for (std::size_t i = 1; i < grads.size(); ++i) {
        std::vector<NdArray<float>*> dst;
        acc.for_each_tensor([&](const std::string&, NdArray<float>& t, bool) { dst.push_back(&t); });
        std::size_t slot = 0;
        grads[i].for_each_tensor([&](const std::string&, const NdArray<float>& g, bool) {
            NdArray<float>& t = *dst[slot++];
            for (std::size_t j = 0; j < t.size(); ++j) t[j] += g[j];
        });
    }
    const float inv = 1.0f / static_cast<float>(batch.size());
    acc.for_each_tensor([&](const std::string&, NdArray<float>& t, bool) {
        for (auto& v : t) v *= inv;
    });
    // the lambda_nn ||w||^2 term enters once per step, kernels only
    std::vector<const NdArray<float>*> kernels;
    params.for_each_tensor([&](const std::string&, const NdArray<float>& t, bool is_kernel) {
        kernels.push_back(is_kernel ? &t : nullptr);
    });
    std::size_t slot = 0;
    acc.for_each_tensor([&](const std::string&, NdArray<float>& t, bool is_kernel) {
        const NdArray<float>* w = kernels[slot++];
        if (!is_kernel || !w) return;
        const float c = static_cast<float>(2.0 * loss_cfg.lambda_nn);
        for (std::size_t j = 0; j < t.size(); ++j) t[j] += c * (*w)[j];
    });

    mean_loss = LossBreakdown{};
    for (const auto& l : losses) {
        mean_loss.mse_fluid += l.mse_fluid / batch.size();
        mean_loss.mse_nonfluid += l.mse_nonfluid / batch.size();
        mean_loss.mp += l.mp / batch.size();
    }
    mean_loss.weight_reg = loss_cfg.lambda_nn * wsq;
    mean_loss.total = loss_cfg.alpha * (mean_loss.mse_fluid + mean_loss.mse_nonfluid) +
                      (1.0 - loss_cfg.alpha) * mean_loss.mp + mean_loss.weight_reg;
    return acc;
}

} // namespace detail

/// Mean loss of a dataset under fixed parameters (no gradients).
inline LossBreakdown evaluate_loss(const NetworkParams& params, const LossConfig& loss_cfg,
                                   const std::vector<PatchPair>& data) {
    require(!data.empty(), "evaluate_loss: empty dataset");
    const double wsq = params.weight_sq_norm();
    std::vector<LossBreakdown> losses(data.size());
    parallel_for(data.size(), [&](std::size_t i) {
        ForwardTrace<float> tr;
        const NdArray<float> pred = forward(params, data[i].lr, tr);
        losses[i] = velocity_loss(pred, data[i].hr, data[i].mask, loss_cfg, wsq);
    });
    LossBreakdown mean;
    for (const auto& l : losses) {
        mean.mse_fluid += l.mse_fluid / data.size();
        mean.mse_nonfluid += l.mse_nonfluid / data.size();
        mean.mp += l.mp / data.size();
    }
    mean.weight_reg = loss_cfg.lambda_nn * wsq;
    mean.total = loss_cfg.alpha * (mean.mse_fluid + mean.mse_nonfluid) +
                 (1.0 - loss_cfg.alpha) * mean.mp + mean.weight_reg;
    return mean;
}

/// Seeded mini-batch training with per-epoch shuffling; tracks the
/// best-validation checkpoint. With an empty validation set the training loss
/// doubles as the selection criterion.
inline TrainResult train(const std::vector<PatchPair>& train_set, const std::vector<PatchPair>& val_set,
                         const NetworkConfig& net_cfg, const LossConfig& loss_cfg,
                         const AdamConfig& adam_cfg, std::uint64_t seed,
                         std::ostream* log = nullptr) {
    require(!train_set.empty(), "train: empty training set");
    loss_cfg.validate();
    std::size_t batch_size = adam_cfg.batch_size;
    if (batch_size > train_set.size()) {
        batch_size = train_set.size();
        if (log) *log << "train: batch size clamped to dataset size " << batch_size << "\n";
    }
    require(batch_size >= 1, "train: batch size must be >= 1");

    TrainResult result;
    result.params = init_network<float>(net_cfg, seed);
    AdamState adam = AdamState::init(result.params);

    bool warned_empty_fluid = false;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    result.best_val = std::numeric_limits<double>::infinity();
    NetworkParams best = result.params;

    for (std::size_t epoch = 0; epoch < adam_cfg.epochs; ++epoch) {
        auto rng = substream(seed, "epoch-shuffle", epoch);
        std::shuffle(order.begin(), order.end(), rng);

        EpochStats stats;
        stats.epoch = epoch;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start + batch_size <= order.size(); start += batch_size) {
            std::vector<const PatchPair*> batch(batch_size);
            for (std::size_t i = 0; i < batch_size; ++i) batch[i] = &train_set[order[start + i]];
            LossBreakdown mean_loss;
            const NetworkParams grads =
                detail::batch_gradients(result.params, loss_cfg, batch, mean_loss);
            adam_step(adam, result.params, grads, adam_cfg);
            stats.train_total += mean_loss.total;
            stats.train_mse_fluid += mean_loss.mse_fluid;
            stats.train_mse_nonfluid += mean_loss.mse_nonfluid;
            stats.train_mp += mean_loss.mp;
            ++n_batches;
            if (!warned_empty_fluid && mean_loss.fluid_empty && log) {
                *log << "train: batch with empty fluid mask, L_mp contributes 0\n";
                warned_empty_fluid = true;
            }
        }
        require(n_batches > 0, "train: dataset smaller than one batch");
        stats.train_total /= n_batches;
        stats.train_mse_fluid /= n_batches;
        stats.train_mse_nonfluid /= n_batches;
        stats.train_mp /= n_batches;

        const LossBreakdown val =
            val_set.empty() ? evaluate_loss(result.params, loss_cfg, train_set)
                            : evaluate_loss(result.params, loss_cfg, val_set);
        stats.val_total = val.total;
        result.curve.push_back(stats);
        if (log)
            *log << "epoch " << epoch << " train " << stats.train_total << " val " << stats.val_total
                 << "\n";

        if (val.total < result.best_val) {
            result.best_val = val.total;
            result.best_epoch = epoch;
            best = result.params;
        }
    }
    result.final_params = result.params;
    result.params = std::move(best);
    return result;
}

inline void write_loss_curve_csv(const std::vector<EpochStats>& curve, const std::string& path) {
    std::ofstream os(path);
    require(os.good(), "write_loss_curve_csv: cannot open " + path);
    os << "epoch,train_total,train_mse_fluid,train_mse_nonfluid,train_mp,val_total\n";
    for (const auto& s : curve) {
        std::ostringstream row;
        row << s.epoch << ',' << std::setprecision(6) << s.train_total << ',' << s.train_mse_fluid
            << ',' << s.train_mse_nonfluid << ',' << s.train_mp << ',' << s.val_total;
        os << row.str() << '\n';
    }
    require(os.good(), "write_loss_curve_csv: write failed for " + path);
}

} // namespace tempoflow
