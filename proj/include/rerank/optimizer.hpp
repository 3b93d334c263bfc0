#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>

namespace rerank {

// Updates one parameter matrix in place from its gradient. Stateful
// implementations key their state to the matrix shape seen first.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual std::string name() const = 0;
  virtual void step(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad) = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  std::string name() const override { return "sgd"; }
  void step(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad) override {
    params -= lr_ * grad;
  }

 private:
  double lr_;
};

// Adafactor with factored second moments: per-row and per-column running
// means stand in for the full element-wise accumulator. Decay follows
// beta2_t = 1 - t^{-0.8}; updates are RMS-clipped to 1 and applied with a
// constant learning rate (no relative-step schedule, no parameter scaling).
class Adafactor final : public Optimizer {
 public:
  explicit Adafactor(double lr) : lr_(lr) {}
  std::string name() const override { return "adafactor"; }
  void step(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad) override;

 private:
  static constexpr double kEps = 1e-30;      // keeps factored means positive
  static constexpr double kClip = 1.0;       // max RMS of the scaled update
  static constexpr double kDecayPow = -0.8;  // beta2_t = 1 - t^kDecayPow

  double lr_;
  long long t_ = 0;
  Eigen::VectorXd row_mean_;  // second-moment mean per row
  Eigen::VectorXd col_mean_;  // second-moment mean per column
};

// "sgd" or "adafactor"; throws std::invalid_argument otherwise.
std::unique_ptr<Optimizer> make_optimizer(const std::string& name, double lr);

}  // namespace rerank
