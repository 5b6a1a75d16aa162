#pragma once

#include <cmath>
#include <vector>

#include "uphdr/nn/layers.hpp"

namespace uphdr::nn {

/// Adam with the adversarial-training moment defaults (0.5, 0.999).
template <typename T>
class Adam {
public:
    Adam() = default;
    Adam(std::vector<Param<T>> params, double lr, double beta1 = 0.5, double beta2 = 0.999,
         double eps = 1e-8)
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (const auto& p : params_) {
            m_.emplace_back(p.value->size(), T(0));
            v_.emplace_back(p.value->size(), T(0));
        }
    }

    void step() {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (size_t i = 0; i < params_.size(); ++i) {
            T* p = params_[i].value->data();
            const T* g = params_[i].grad->data();
            for (size_t j = 0; j < params_[i].value->size(); ++j) {
                m_[i][j] = static_cast<T>(beta1_ * m_[i][j] + (1.0 - beta1_) * g[j]);
                v_[i][j] = static_cast<T>(beta2_ * v_[i][j] + (1.0 - beta2_) * g[j] * g[j]);
                const double mhat = m_[i][j] / bc1;
                const double vhat = v_[i][j] / bc2;
                p[j] -= static_cast<T>(lr_ * mhat / (std::sqrt(vhat) + eps_));
            }
        }
    }

    void zero_grad() {
        for (auto& p : params_) p.grad->fill(T(0));
    }

    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }
    long long step_count() const { return t_; }
    void set_step_count(long long t) { t_ = t; }

    /// Moment buffers, exposed for checkpointing.
    std::vector<std::vector<T>>& first_moments() { return m_; }
    std::vector<std::vector<T>>& second_moments() { return v_; }
    const std::vector<Param<T>>& params() const { return params_; }

private:
    std::vector<Param<T>> params_;
    double lr_ = 1e-4, beta1_ = 0.5, beta2_ = 0.999, eps_ = 1e-8;
    long long t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

}  // namespace uphdr::nn
