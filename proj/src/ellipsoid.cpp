#include "meco/ellipsoid.hpp"

#include <cmath>
#include <stdexcept>

namespace meco {

Ellipsoid::Ellipsoid(Eigen::VectorXd center, double radius)
    : center_(std::move(center)),
      shape_(Eigen::MatrixXd::Identity(center_.size(), center_.size()) * radius * radius),
      log_volume_(static_cast<double>(center_.size()) * std::log(radius)) {
  if (center_.size() < 2) throw std::invalid_argument("Ellipsoid: dimension must be at least 2");
  if (!(radius > 0)) throw std::invalid_argument("Ellipsoid: radius must be positive");
}

double Ellipsoid::support(const Eigen::VectorXd& s) const {
  return std::sqrt(std::max(0.0, s.dot(shape_ * s)));
}

Ellipsoid::CutResult Ellipsoid::cut(const Eigen::VectorXd& s, double offset) {
  const double n = static_cast<double>(center_.size());
  const Eigen::VectorXd ps = shape_ * s;
  const double width = std::sqrt(std::max(0.0, s.dot(ps)));
  if (!(width > 0)) return CutResult::Skipped;
  const double alpha = offset / width;
  if (alpha >= 1.0) return CutResult::Empty;
  if (alpha <= -1.0 / n) return CutResult::Skipped;

  const Eigen::VectorXd b = ps / width;
  const double step = (1.0 + n * alpha) / (n + 1.0);
  const double shrink = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
  const double dilate = n * n * (1.0 - alpha * alpha) / (n * n - 1.0);

  center_ += step * b;
  shape_ = dilate * (shape_ - shrink * b * b.transpose());
  shape_ = 0.5 * (shape_ + shape_.transpose());
  log_volume_ += 0.5 * (n * std::log(dilate) + std::log1p(-shrink));
  return CutResult::Updated;
}

bool Ellipsoid::positive_definite() const {
  Eigen::LLT<Eigen::MatrixXd> llt(shape_);
  return llt.info() == Eigen::Success;
}

}  // namespace meco
