#ifndef NULLITYLAB_COMMON_HPP
#define NULLITYLAB_COMMON_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullitylab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/** Input that violates an operation's precondition (CLI exit code 2). */
struct invalid_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Mismatched ambient dimensions between operands. */
struct dimension_mismatch : invalid_input {
  using invalid_input::invalid_input;
};

/** Filesystem-level failure (CLI exit code 3). */
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Global rank tolerance; NULLITYLAB_TOL overrides the 1e-9 default. */
inline double default_tol() {
  static const double tol = [] {
    if (const char* s = std::getenv("NULLITYLAB_TOL")) {
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end != s && v > 0) return v;
    }
    return 1e-9;
  }();
  return tol;
}

/** Residual tolerance for theorem pass/fail flags in reports. */
constexpr double report_tol = 1e-8;

/** Dense rank-3 array c[i][j][k]; used for structure constants. */
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int d) : d_(d), a_(static_cast<size_t>(d) * d * d, 0.0) {}
  int dim() const { return d_; }
  double& operator()(int i, int j, int k) { return a_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return a_[idx(i, j, k)]; }
  const std::vector<double>& flat() const { return a_; }
  std::vector<double>& flat() { return a_; }

 private:
  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * d_ + j) * d_ + k;
  }
  int d_ = 0;
  std::vector<double> a_;
};

/** Dense rank-4 array R[i][j][k][l]; used for the curvature tensor. */
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int d) : d_(d), a_(static_cast<size_t>(d) * d * d * d, 0.0) {}
  int dim() const { return d_; }
  double& operator()(int i, int j, int k, int l) { return a_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return a_[idx(i, j, k, l)]; }
  double max_abs() const {
    double m = 0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * d_ + j) * d_ + k) * d_ + l;
  }
  int d_ = 0;
  std::vector<double> a_;
};

}  // namespace nullitylab

#endif
