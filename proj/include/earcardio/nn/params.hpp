#pragma once

#include <string>
#include <vector>

#include "earcardio/nn/tensor.hpp"
#include "earcardio/util/rng.hpp"

namespace earcardio::nn {

/// All model weights live in one flat vector with named views, so the
/// optimizer, the finite-difference checks and the checkpoint format all see
/// the same storage.
class ParamStore {
public:
    struct Entry {
        std::string name;
        std::size_t offset;
        std::vector<int> shape;
        int fan_in; // 0 = zero-init (biases), else uniform +-1/sqrt(fan_in)
    };

    std::size_t add(const std::string& name, std::vector<int> shape, int fan_in) {
        Entry e{name, values_.size(), std::move(shape), fan_in};
        values_.resize(values_.size() + Tensor::numel_of(e.shape), 0.0);
        entries_.push_back(e);
        return entries_.back().offset;
    }

    /// Fill every entry in registration order; deterministic given the seed.
    void init_params(uint64_t seed) { init_from(seed, 0); }

    /// Initialize only the entries at or after from_offset (head re-init after
    /// a swap); earlier values are untouched.
    void init_from(uint64_t seed, std::size_t from_offset) {
        Rng rng(seed);
        for (const auto& e : entries_) {
            if (e.offset < from_offset) continue;
            const std::size_t n = Tensor::numel_of(e.shape);
            if (e.fan_in <= 0) {
                for (std::size_t i = 0; i < n; ++i) values_[e.offset + i] = 0.0;
            } else {
                const double s = 1.0 / std::sqrt(static_cast<double>(e.fan_in));
                for (std::size_t i = 0; i < n; ++i) values_[e.offset + i] = rng.uniform(-s, s);
            }
        }
    }

    /// Remove every entry at or after the offset (used when swapping the task
    /// head, which is always registered last).
    void truncate_from(std::size_t offset) {
        values_.resize(offset);
        while (!entries_.empty() && entries_.back().offset >= offset) entries_.pop_back();
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<Entry>& entries() const { return entries_; }

    const double* ptr(std::size_t offset) const { return values_.data() + offset; }
    double* ptr(std::size_t offset) { return values_.data() + offset; }

    std::size_t size() const { return values_.size(); }

    const Entry* find(const std::string& name) const {
        for (const auto& e : entries_)
            if (e.name == name) return &e;
        return nullptr;
    }

private:
    std::vector<double> values_;
    std::vector<Entry> entries_;
};

} // namespace earcardio::nn
