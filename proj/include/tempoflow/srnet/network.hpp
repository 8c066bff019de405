#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tempoflow/core/container.hpp"
#include "tempoflow/core/rng.hpp"
#include "tempoflow/srnet/tensor_ops.hpp"

namespace tempoflow {

struct NetworkConfig {
    std::size_t c_in = 6;
    std::size_t c_out = 3;
    std::size_t filters = 32;
    std::size_t n_res_lr = 6;  ///< residual blocks before temporal upsampling
    std::size_t n_res_hr = 3;  ///< residual blocks after
    double leaky_slope = 0.2;

    void validate() const {
        require(c_in >= 1 && c_out >= 1 && filters >= 1, "NetworkConfig: zero-sized layer");
        require(n_res_lr >= 1 && n_res_hr >= 1, "NetworkConfig: need at least one block per stage");
        require(leaky_slope >= 0.0 && leaky_slope < 1.0, "NetworkConfig: bad leaky slope");
    }
};

template <typename T>
struct ConvParamsT {
    NdArray<T> w;  // [c_out][c_in][ks][ks][ks]
    NdArray<T> b;  // [c_out]
};

template <typename T>
struct ResBlockParamsT {
    ConvParamsT<T> conv1;
    ConvParamsT<T> conv2;
};

template <typename T>
struct NetworkParamsT {
    NetworkConfig config;
    ConvParamsT<T> head;                       // c_in -> F, 3x3x3
    std::vector<ResBlockParamsT<T>> lr_blocks; // F -> F
    std::vector<ResBlockParamsT<T>> hr_blocks;
    ConvParamsT<T> tail;                       // F -> c_out, 1x1x1

    /// Visit every tensor in a fixed order (used by init, Adam, serialization).
    template <typename Fn>
    void for_each_tensor(Fn&& fn) {
        fn("head.w", head.w, true);
        fn("head.b", head.b, false);
        for (std::size_t i = 0; i < lr_blocks.size(); ++i) {
            const std::string p = "lr" + std::to_string(i);
            fn(p + ".c1.w", lr_blocks[i].conv1.w, true);
            fn(p + ".c1.b", lr_blocks[i].conv1.b, false);
            fn(p + ".c2.w", lr_blocks[i].conv2.w, true);
            fn(p + ".c2.b", lr_blocks[i].conv2.b, false);
        }
        for (std::size_t i = 0; i < hr_blocks.size(); ++i) {
            const std::string p = "hr" + std::to_string(i);
            fn(p + ".c1.w", hr_blocks[i].conv1.w, true);
            fn(p + ".c1.b", hr_blocks[i].conv1.b, false);
            fn(p + ".c2.w", hr_blocks[i].conv2.w, true);
            fn(p + ".c2.b", hr_blocks[i].conv2.b, false);
        }
        fn("tail.w", tail.w, true);
        fn("tail.b", tail.b, false);
    }

    template <typename Fn>
    void for_each_tensor(Fn&& fn) const {
        const_cast<NetworkParamsT*>(this)->for_each_tensor(
            [&](const std::string& name, NdArray<T>& t, bool is_kernel) {
                fn(name, const_cast<const NdArray<T>&>(t), is_kernel);
            });
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for_each_tensor([&](const std::string&, const NdArray<T>& t, bool) { n += t.size(); });
        return n;
    }

    double weight_sq_norm() const {
        double s = 0.0;
        for_each_tensor([&](const std::string&, const NdArray<T>& t, bool is_kernel) {
            if (!is_kernel) return;
            for (const auto& v : t) s += static_cast<double>(v) * v;
        });
        return s;
    }
};

using NetworkParams = NetworkParamsT<float>;

namespace detail {

template <typename T>
ConvParamsT<T> make_conv(std::size_t cout, std::size_t cin, std::size_t ks) {
    ConvParamsT<T> c;
    c.w = NdArray<T>({cout, cin, ks, ks, ks});
    c.b = NdArray<T>({cout});
    c.w.fill(T(0));
    c.b.fill(T(0));
    return c;
}

template <typename T>
void he_init(NdArray<T>& w, std::mt19937_64& rng) {
    const std::size_t fan_in = w.size() / w.dim(0);
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (auto& v : w) v = static_cast<T>(gauss(rng));
}

} // namespace detail

/// Allocate and He-initialize all parameters, deterministically from seed.
template <typename T = float>
NetworkParamsT<T> init_network(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    NetworkParamsT<T> p;
    p.config = cfg;
    p.head = detail::make_conv<T>(cfg.filters, cfg.c_in, 3);
    for (std::size_t i = 0; i < cfg.n_res_lr; ++i)
        p.lr_blocks.push_back(
            {detail::make_conv<T>(cfg.filters, cfg.filters, 3), detail::make_conv<T>(cfg.filters, cfg.filters, 3)});
    for (std::size_t i = 0; i < cfg.n_res_hr; ++i)
        p.hr_blocks.push_back(
            {detail::make_conv<T>(cfg.filters, cfg.filters, 3), detail::make_conv<T>(cfg.filters, cfg.filters, 3)});
    p.tail = detail::make_conv<T>(cfg.c_out, cfg.filters, 1);

    std::size_t layer = 0;
    p.for_each_tensor([&](const std::string&, NdArray<T>& t, bool is_kernel) {
        if (!is_kernel) return;  // biases start at zero
        auto rng = substream(seed, "he-init", layer++);
        detail::he_init(t, rng);
    });
    return p;
}

/// Intermediates needed by the backward pass.
template <typename T>
struct ForwardTrace {
    NdArray<T> input;
    NdArray<T> head_pre;
    NdArray<T> head_act;
    struct Block {
        NdArray<T> in;      // block input (also the skip branch)
        NdArray<T> c1_pre;
        NdArray<T> c1_act;
        NdArray<T> out;     // in + conv2(c1_act)
    };
    std::vector<Block> lr_blocks;
    NdArray<T> up_out;
    std::vector<Block> hr_blocks;
    NdArray<T> output;
    ConvScratch<T> scratch;
};

namespace detail {

template <typename T>
void res_block_forward(const ResBlockParamsT<T>& blk, const NdArray<T>& in, double slope,
                       typename ForwardTrace<T>::Block& tr, ConvScratch<T>& scratch) {
    tr.in = in;
    conv3d_forward(in, blk.conv1.w, blk.conv1.b, tr.c1_pre, scratch);
    leaky_relu_forward(tr.c1_pre, static_cast<T>(slope), tr.c1_act);
    conv3d_forward(tr.c1_act, blk.conv2.w, blk.conv2.b, tr.out, scratch);
    for (std::size_t i = 0; i < tr.out.size(); ++i) tr.out[i] += in[i];
}

template <typename T>
void res_block_backward(const ResBlockParamsT<T>& blk, const typename ForwardTrace<T>::Block& tr,
                        double slope, const NdArray<T>& dout, ResBlockParamsT<T>& grad,
                        NdArray<T>& din, ConvScratch<T>& scratch) {
    NdArray<T> d_c1act, d_c1pre;
    conv3d_backward(tr.c1_act, blk.conv2.w, dout, grad.conv2.w, grad.conv2.b, d_c1act, scratch);
    leaky_relu_backward(tr.c1_pre, static_cast<T>(slope), d_c1act, d_c1pre);
    conv3d_backward(tr.in, blk.conv1.w, d_c1pre, grad.conv1.w, grad.conv1.b, din, scratch);
    for (std::size_t i = 0; i < din.size(); ++i) din[i] += dout[i];  // identity skip
}

} // namespace detail

/// Run the network on one channel stack [c_in][D0][D1][T]; returns
/// [c_out][D0][D1][2T] and fills the trace for a subsequent backward pass.
template <typename T>
NdArray<T> forward(const NetworkParamsT<T>& params, const NdArray<T>& x, ForwardTrace<T>& tr) {
    const NetworkConfig& cfg = params.config;
    require(x.ndim() == 4 && x.dim(0) == cfg.c_in, "forward: input shape mismatch");
    for (const auto& v : x) require(std::isfinite(static_cast<double>(v)), "forward: non-finite input");

    tr.input = x;
    conv3d_forward(x, params.head.w, params.head.b, tr.head_pre, tr.scratch);
    leaky_relu_forward(tr.head_pre, static_cast<T>(cfg.leaky_slope), tr.head_act);

    tr.lr_blocks.resize(cfg.n_res_lr);
    const NdArray<T>* cur = &tr.head_act;
    for (std::size_t i = 0; i < cfg.n_res_lr; ++i) {
        detail::res_block_forward(params.lr_blocks[i], *cur, cfg.leaky_slope, tr.lr_blocks[i], tr.scratch);
        cur = &tr.lr_blocks[i].out;
    }

    upsample_time_forward(*cur, tr.up_out);

    tr.hr_blocks.resize(cfg.n_res_hr);
    cur = &tr.up_out;
    for (std::size_t i = 0; i < cfg.n_res_hr; ++i) {
        detail::res_block_forward(params.hr_blocks[i], *cur, cfg.leaky_slope, tr.hr_blocks[i], tr.scratch);
        cur = &tr.hr_blocks[i].out;
    }

    conv3d_forward(*cur, params.tail.w, params.tail.b, tr.output, tr.scratch);
    return tr.output;
}

/// Exact reverse-mode gradients of a scalar loss with upstream derivative
/// d_output; returns parameter gradients shaped like the parameters.
template <typename T>
NetworkParamsT<T> backward(const NetworkParamsT<T>& params, ForwardTrace<T>& tr,
                           const NdArray<T>& d_output) {
    const NetworkConfig& cfg = params.config;
    NetworkParamsT<T> grad;
    grad.config = cfg;
    grad.lr_blocks.resize(cfg.n_res_lr);
    grad.hr_blocks.resize(cfg.n_res_hr);

    const NdArray<T>* tail_in = cfg.n_res_hr ? &tr.hr_blocks.back().out : &tr.up_out;
    NdArray<T> d_cur;
    conv3d_backward(*tail_in, params.tail.w, d_output, grad.tail.w, grad.tail.b, d_cur, tr.scratch);

    for (std::size_t i = cfg.n_res_hr; i-- > 0;) {
        NdArray<T> din;
        detail::res_block_backward(params.hr_blocks[i], tr.hr_blocks[i], cfg.leaky_slope, d_cur,
                                   grad.hr_blocks[i], din, tr.scratch);
        d_cur = std::move(din);
    }

    NdArray<T> d_up;
    upsample_time_backward(d_cur, d_up);
    d_cur = std::move(d_up);

    for (std::size_t i = cfg.n_res_lr; i-- > 0;) {
        NdArray<T> din;
        detail::res_block_backward(params.lr_blocks[i], tr.lr_blocks[i], cfg.leaky_slope, d_cur,
                                   grad.lr_blocks[i], din, tr.scratch);
        d_cur = std::move(din);
    }

    NdArray<T> d_head_pre, d_input;
    leaky_relu_backward(tr.head_pre, static_cast<T>(cfg.leaky_slope), d_cur, d_head_pre);
    conv3d_backward(tr.input, params.head.w, d_head_pre, grad.head.w, grad.head.b, d_input, tr.scratch);

    grad.for_each_tensor([](const std::string& name, NdArray<T>& t, bool) {
        for (const auto& v : t)
            require(std::isfinite(static_cast<double>(v)), "backward: non-finite gradient in " + name);
    });
    return grad;
}

/// Serialize parameters into an F4D container (one array per tensor plus the
/// config in the manifest metadata).
inline f4d::Container params_to_container(const NetworkParams& params) {
    f4d::Container c;
    params.for_each_tensor([&](const std::string& name, const NdArray<float>& t, bool) {
        c.add(name, t);
    });
    c.meta["kind"] = "srnet-params";
    c.meta["network"] = {{"c_in", params.config.c_in},
                         {"c_out", params.config.c_out},
                         {"filters", params.config.filters},
                         {"n_res_lr", params.config.n_res_lr},
                         {"n_res_hr", params.config.n_res_hr},
                         {"leaky_slope", params.config.leaky_slope}};
    return c;
}

inline NetworkParams params_from_container(const f4d::Container& c) {
    require(c.meta.contains("network"), "params_from_container: missing network config");
    const auto& j = c.meta.at("network");
    NetworkConfig cfg;
    cfg.c_in = j.at("c_in").get<std::size_t>();
    cfg.c_out = j.at("c_out").get<std::size_t>();
    cfg.filters = j.at("filters").get<std::size_t>();
    cfg.n_res_lr = j.at("n_res_lr").get<std::size_t>();
    cfg.n_res_hr = j.at("n_res_hr").get<std::size_t>();
    cfg.leaky_slope = j.at("leaky_slope").get<double>();

    NetworkParams params = init_network<float>(cfg, 0);
    params.for_each_tensor([&](const std::string& name, NdArray<float>& t, bool) {
        const auto& src = c.get<float>(name);
        require(src.shape() == t.shape(), "params_from_container: shape mismatch for " + name);
        t = src;
    });
    return params;
}

} // namespace tempoflow
