#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempoflow {

/// Dense row-major (C-order, last index fastest) n-dimensional array.
template <typename T>
class NdArray {
public:
    NdArray() = default;

    explicit NdArray(std::vector<std::size_t> shape, T fill = T{})
        : shape_(std::move(shape)), data_(count(shape_), fill) {}

    static std::size_t count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (auto s : shape) n *= s;
        return n;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](std::size_t flat) { return data_[flat]; }
    const T& operator[](std::size_t flat) const { return data_[flat]; }

    template <typename... Ix>
    T& operator()(Ix... ix) { return data_[flat_index(ix...)]; }
    template <typename... Ix>
    const T& operator()(Ix... ix) const { return data_[flat_index(ix...)]; }

    template <typename... Ix>
    std::size_t flat_index(Ix... ix) const {
        static_assert((std::is_integral_v<Ix> && ...));
        const std::size_t idx[] = {static_cast<std::size_t>(ix)...};
        std::size_t flat = 0;
        for (std::size_t d = 0; d < sizeof...(Ix); ++d)
            flat = flat * shape_[d] + idx[d];
        return flat;
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    bool same_shape(const NdArray& other) const { return shape_ == other.shape_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

private:
    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace tempoflow
