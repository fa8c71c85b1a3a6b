#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace earcardio::nn {

/// Dense row-major tensor of doubles. Shapes are small here (windows of
/// 6 x 125), so clarity beats cleverness throughout this module.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), 0.0);
    }

    static std::size_t numel_of(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) n *= static_cast<std::size_t>(d);
        return n;
    }

    std::size_t numel() const { return data.size(); }

    double& at(int i) { return data[static_cast<std::size_t>(i)]; }
    double at(int i) const { return data[static_cast<std::size_t>(i)]; }
    double& at(int i, int j) {
        return data[static_cast<std::size_t>(i) * shape[1] + j];
    }
    double at(int i, int j) const {
        return data[static_cast<std::size_t>(i) * shape[1] + j];
    }
    double& at(int i, int j, int k) {
        return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
    }
    double at(int i, int j, int k) const {
        return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

} // namespace earcardio::nn
