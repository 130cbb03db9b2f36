#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace procap {

// AdamW with decoupled weight decay (decay applied to the parameters, not
// folded into the gradient).
class AdamW {
public:
    AdamW(size_t parameter_count, double learning_rate, double weight_decay = 0.01,
          double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
        : lr_(learning_rate),
          weight_decay_(weight_decay),
          beta1_(beta1),
          beta2_(beta2),
          epsilon_(epsilon),
          m_(parameter_count, 0.0),
          v_(parameter_count, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads) {
        ++t_;
        double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
            double m_hat = m_[i] / bc1;
            double v_hat = v_[i] / bc2;
            params[i] -= lr_ * (m_hat / (std::sqrt(v_hat) + epsilon_) +
                                weight_decay_ * params[i]);
        }
    }

    size_t steps() const { return t_; }

private:
    double lr_;
    double weight_decay_;
    double beta1_;
    double beta2_;
    double epsilon_;
    size_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

} // namespace procap
