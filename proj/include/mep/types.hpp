#ifndef MEP_TYPES_HPP
#define MEP_TYPES_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace mep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Eigenvalue of a 3-parameter problem.
struct EigenTriple {
  Complex lambda{0.0};
  Complex mu{0.0};
  Complex eta{0.0};

  double dist_max(const EigenTriple& o) const {
    return std::max({std::abs(lambda - o.lambda), std::abs(mu - o.mu),
                     std::abs(eta - o.eta)});
  }
  double dist2(const EigenTriple& o) const {
    return std::norm(lambda - o.lambda) + std::norm(mu - o.mu) +
           std::norm(eta - o.eta);
  }
};

/// Eigenvalue with decomposable right (and optionally left) eigenvector
/// components. Right components have unit 2-norm.
struct EigenPair {
  EigenTriple value;
  std::array<Vector, 3> right;
  std::array<Vector, 3> left;  // empty unless computed
  double residual_norm = 0.0;

  bool has_left() const { return left[0].size() > 0; }
};

/// Eigenvalue target: a point in (lambda, mu, eta) space or the plane
/// eta = eta_tar.
struct Target {
  enum class Kind { Point, EtaPlane };
  Kind kind = Kind::EtaPlane;
  EigenTriple point{};
  Complex eta_tar{0.0};

  static Target at_point(Complex l, Complex m, Complex e) {
    Target t;
    t.kind = Kind::Point;
    t.point = {l, m, e};
    return t;
  }
  static Target eta_plane(Complex e) {
    Target t;
    t.kind = Kind::EtaPlane;
    t.eta_tar = e;
    return t;
  }

  // Squared distance for Point targets, |eta - eta_tar| for plane targets.
  double distance(const EigenTriple& v) const {
    if (kind == Kind::Point) return v.dist2(point);
    return std::abs(v.eta - eta_tar);
  }
};

class MepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public MepError {
 public:
  using MepError::MepError;
};

class SingularityError : public MepError {
 public:
  using MepError::MepError;
};

}  // namespace mep

#endif
