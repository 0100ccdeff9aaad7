#pragma once

#include <Eigen/Dense>

namespace meco {

// Ellipsoid {y : (y - c)^T P^{-1} (y - c) <= 1} localising the maximiser of a
// concave function. Cuts keep the half-space s^T (y - c) >= offset; a positive
// offset is a deep cut, a negative one (down to -1/n) a shallow cut.
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, double radius);

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  Eigen::Index dimension() const { return center_.size(); }
  // log det(P) / 2, i.e. log volume up to the unit-ball constant.
  double log_volume() const { return log_volume_; }

  // max of s^T (y - c) over the ellipsoid.
  double support(const Eigen::VectorXd& s) const;

  enum class CutResult { Updated, Empty, Skipped };
  CutResult cut(const Eigen::VectorXd& s, double offset);

  // Cholesky of the shape matrix succeeds.
  bool positive_definite() const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  double log_volume_;
};

}  // namespace meco
