#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctsr/tensor.hpp"

namespace ctsr::nn {

struct AdamWConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2;
};

// Ordered map name -> parameter tensor plus Adam moment buffers. One shared
// step counter keeps the per-parameter step counts identical by construction.
template <typename T>
class ParamStore {
public:
    struct Entry {
        std::string name;
        Tensor<T> value;
        std::vector<T> m;  // first moment
        std::vector<T> v;  // second moment
    };

    Tensor<T>& add(const std::string& name, Tensor<T> value) {
        if (by_name_.count(name))
            throw std::invalid_argument("duplicate parameter name '" + name + "'");
        value.enable_grad();
        Entry e;
        e.name = name;
        e.value = std::move(value);
        e.m.assign(e.value.data.size(), T(0));
        e.v.assign(e.value.data.size(), T(0));
        by_name_[name] = entries_.size();
        entries_.push_back(std::move(e));
        return entries_.back().value;
    }

    bool has(const std::string& name) const { return by_name_.count(name) != 0; }

    Tensor<T>& at(const std::string& name) {
        auto it = by_name_.find(name);
        if (it == by_name_.end())
            throw std::out_of_range("no parameter named '" + name + "'");
        return entries_[it->second].value;
    }
    const Tensor<T>& at(const std::string& name) const {
        return const_cast<ParamStore*>(this)->at(name);
    }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::int64_t step_count() const { return step_; }

    void zero_grads() {
        for (auto& e : entries_) e.value.zero_grad();
    }

    std::int64_t total_numel() const {
        std::int64_t n = 0;
        for (const auto& e : entries_) n += e.value.numel();
        return n;
    }

    // Accumulates `scale * src.grad` into each parameter's grad buffer.
    // Entry order and count must match; used to reduce per-item gradient
    // buffers in a fixed order.
    void accumulate_grads_from(const ParamStore<T>& src, T scale = T(1)) {
        if (src.size() != size())
            throw std::invalid_argument("parameter store layout mismatch");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            auto& dst = entries_[i].value.grad;
            const auto& s = src.entries_[i].value.grad;
            if (dst.size() != s.size())
                throw std::invalid_argument("parameter shape mismatch in gradient reduce");
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * s[j];
        }
    }

    // Deep copy of names, shapes, and values; moments reset, grads zero.
    ParamStore<T> clone_values() const {
        ParamStore<T> out;
        for (const auto& e : entries_) {
            Tensor<T> t(e.value.shape);
            t.data = e.value.data;
            out.add(e.name, std::move(t));
        }
        return out;
    }

    friend void adamw_step(ParamStore<T>& params, const AdamWConfig& cfg) {
        for (auto& e : params.entries_)
            if (e.value.grad.size() != e.value.data.size())
                throw std::runtime_error("adamw_step: parameter '" + e.name + "' has no gradient");
        params.step_ += 1;
        const double t = static_cast<double>(params.step_);
        const double bc1 = 1.0 - std::pow(cfg.beta1, t);
        const double bc2 = 1.0 - std::pow(cfg.beta2, t);
        for (auto& e : params.entries_) {
            T* p = e.value.data.data();
            T* g = e.value.grad.data();
            T* m = e.m.data();
            T* v = e.v.data();
            const std::size_t n = e.value.data.size();
            for (std::size_t i = 0; i < n; ++i) {
                const double gi = static_cast<double>(g[i]);
                const double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * gi;
                const double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * gi * gi;
                m[i] = static_cast<T>(mi);
                v[i] = static_cast<T>(vi);
                const double mhat = mi / bc1;
                const double vhat = vi / bc2;
                const double update = cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps)) +
                                      cfg.lr * cfg.weight_decay * static_cast<double>(p[i]);
                p[i] = static_cast<T>(static_cast<double>(p[i]) - update);
            }
        }
        params.zero_grads();
    }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::int64_t step_ = 0;
};

using ParamStoreF = ParamStore<float>;
using ParamStoreD = ParamStore<double>;

}  // namespace ctsr::nn
