#include "rerank/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rerank {

void Adafactor::step(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad) {
  if (params.rows() != grad.rows() || params.cols() != grad.cols()) {
    throw std::invalid_argument("adafactor: parameter/gradient shape mismatch");
  }
  if (t_ == 0) {
    row_mean_ = Eigen::VectorXd::Zero(params.rows());
    col_mean_ = Eigen::VectorXd::Zero(params.cols());
  } else if (row_mean_.size() != params.rows() || col_mean_.size() != params.cols()) {
    throw std::invalid_argument("adafactor: shape changed between steps");
  }

  ++t_;
  const double beta2t = 1.0 - std::pow(static_cast<double>(t_), kDecayPow);
  const Eigen::ArrayXXd sq = grad.array().square() + kEps;

  row_mean_ = beta2t * row_mean_.array() + (1.0 - beta2t) * sq.rowwise().mean();
  col_mean_ = beta2t * col_mean_.array() + (1.0 - beta2t) * sq.colwise().mean().transpose();

  // Rank-1 reconstruction v_ij ~= row_i * col_j / mean(row), applied as
  // grad / sqrt(v).
  const Eigen::ArrayXd r_factor = (row_mean_.array() / row_mean_.mean()).rsqrt();
  const Eigen::ArrayXd c_factor = col_mean_.array().rsqrt();
  Eigen::ArrayXXd update = grad.array();
  update.colwise() *= r_factor;
  update.rowwise() *= c_factor.transpose();

  const double rms = std::sqrt(update.square().mean());
  update /= std::max(1.0, rms / kClip);
  params.array() -= lr_ * update;
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, double lr) {
  if (name == "sgd") return std::make_unique<Sgd>(lr);
  if (name == "adafactor") return std::make_unique<Adafactor>(lr);
  throw std::invalid_argument("unknown optimizer: " + name);
}

}  // namespace rerank
