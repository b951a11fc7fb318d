/// \file hifir/condest.hpp
/// \brief Incremental condition estimation for growing triangular factors

#pragma once

#include <span>
#include <vector>

namespace hifir {

enum class IceJob { largest = 1, smallest = 2 };

struct IceUpdate {
  double sest;  ///< new singular value estimate
  double s;     ///< scale of the old approximate vector
  double c;     ///< weight of the new component
};

/// \brief one step of Bischof's incremental condition estimator
///
/// Given an approximate singular vector x of the leading j-by-j block R_j
/// with estimate sest, returns the estimate for [R_j w; 0 gamma] with the
/// new vector [s x; c]. Same contract as LAPACK dlaic1.
IceUpdate ice_update(IceJob job, std::span<const double> x, double sest,
                     std::span<const double> w, double gamma);

/// \class IncrementalCondition
/// \brief tracks extreme singular value estimates of an upper triangle
///        that grows one column at a time
class IncrementalCondition {
 public:
  void reset();

  /// \brief append column R(0:k, k), with R(k, k) as its last entry
  void push_column(std::span<const double> col);

  /// \brief estimates the new column would produce, without committing
  std::pair<double, double> peek(std::span<const double> col) const;

  std::size_t size() const noexcept { return xmax_.size(); }
  double      smax() const noexcept { return smax_; }
  double      smin() const noexcept { return smin_; }
  /// \brief smax / smin, infinity when smin vanishes, 1 when empty
  double kappa() const noexcept;

 private:
  std::vector<double> xmax_, xmin_;
  double              smax_ = 0.0, smin_ = 0.0;
};

}  // namespace hifir
