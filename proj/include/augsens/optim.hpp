#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace augsens {

inline double sgd_step(double w, double g, double lr) { return w - lr * g; }

inline void sgd_step(Eigen::Ref<Eigen::VectorXd> w,
                     const Eigen::Ref<const Eigen::VectorXd>& g, double lr) {
  w -= lr * g;
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators plus the step count, zero-initialized.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd u;
  std::int64_t step = 0;

  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), u(Eigen::VectorXd::Zero(n)) {}
};

// One bias-corrected Adam update applied in place:
//   m <- b1*m + (1-b1)*g,  u <- b2*u + (1-b2)*g^2
//   w += -lr * m_hat / (sqrt(u_hat) + eps)
inline void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> w,
                      const Eigen::Ref<const Eigen::VectorXd>& g, double lr,
                      const AdamConfig& cfg = {}) {
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g;
  state.u = cfg.beta2 * state.u + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  const double m_corr =
      1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double u_corr =
      1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  w.array() -= lr * (state.m.array() / m_corr) /
               ((state.u.array() / u_corr).sqrt() + cfg.epsilon);
}

}  // namespace augsens
