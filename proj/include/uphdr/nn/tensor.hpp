#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "uphdr/errors.hpp"

namespace uphdr::nn {

/// Dense NHWC tensor. All activations and parameters in the network stack
/// use this; parameters are stored with n = 1 where a dimension is unused.
template <typename T>
struct Tensor {
    int n = 0, h = 0, w = 0, c = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int n_, int h_, int w_, int c_, T fill = T(0))
        : n(n_), h(h_), w(w_), c(c_),
          v(static_cast<size_t>(n_) * h_ * w_ * c_, fill) {}

    static Tensor zeros(int n_, int h_, int w_, int c_) { return Tensor(n_, h_, w_, c_); }

    size_t size() const { return v.size(); }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    T& at(int in, int iy, int ix, int ic) {
        return v[((static_cast<size_t>(in) * h + iy) * w + ix) * c + ic];
    }
    T at(int in, int iy, int ix, int ic) const {
        return v[((static_cast<size_t>(in) * h + iy) * w + ix) * c + ic];
    }

    bool same_shape(const Tensor& o) const {
        return n == o.n && h == o.h && w == o.w && c == o.c;
    }

    void fill(T x) { std::fill(v.begin(), v.end(), x); }

    bool all_finite() const {
        for (T x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }

    Tensor& operator+=(const Tensor& o) {
        if (!same_shape(o)) throw ShapeError("Tensor+=: shape mismatch");
        for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }

    Tensor& scale(T s) {
        for (T& x : v) x *= s;
        return *this;
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(n, h, w, c);
        for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
        return out;
    }
};

}  // namespace uphdr::nn
