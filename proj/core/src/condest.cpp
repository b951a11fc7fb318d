#include "hifir/condest.hpp"

#include <cmath>
#include <limits>

#include "hifir/sparse.hpp"

namespace hifir {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;  // dlamch('E')

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

IceUpdate largest(double alpha, double sest, double gamma) {
  const double absalp = std::abs(alpha), absgam = std::abs(gamma), absest = std::abs(sest);
  if (sest == 0.0) {
    const double s1 = std::max(absgam, absalp);
    if (s1 == 0.0) return {0.0, 0.0, 1.0};
    double       s = alpha / s1, c = gamma / s1;
    const double t = std::sqrt(s * s + c * c);
    return {s1 * t, s / t, c / t};
  }
  if (absgam <= kEps * absest) {
    const double t  = std::max(absest, absalp);
    const double s1 = absest / t, s2 = absalp / t;
    return {t * std::sqrt(s1 * s1 + s2 * s2), 1.0, 0.0};
  }
  if (absalp <= kEps * absest) {
    if (absgam <= absest) return {absest, 1.0, 0.0};
    return {absgam, 0.0, 1.0};
  }
  if (absest <= kEps * absalp || absest <= kEps * absgam) {
    if (absgam <= absalp) {
      const double t = absgam / absalp, s = std::sqrt(1.0 + t * t);
      return {absalp * s, sign_of(1.0, alpha) / s, (gamma / absalp) / s};
    }
    const double t = absalp / absgam, c = std::sqrt(1.0 + t * t);
    return {absgam * c, (alpha / absgam) / c, sign_of(1.0, gamma) / c};
  }
  const double zeta1 = alpha / absest, zeta2 = gamma / absest;
  const double b     = (1.0 - zeta1 * zeta1 - zeta2 * zeta2) * 0.5;
  const double c     = zeta1 * zeta1;
  const double t     = b > 0.0 ? c / (b + std::sqrt(b * b + c)) : std::sqrt(b * b + c) - b;
  const double sine = -zeta1 / t, cosine = -zeta2 / (1.0 + t);
  const double nrm = std::sqrt(sine * sine + cosine * cosine);
  return {std::sqrt(t + 1.0) * absest, sine / nrm, cosine / nrm};
}

IceUpdate smallest(double alpha, double sest, double gamma) {
  const double absalp = std::abs(alpha), absgam = std::abs(gamma), absest = std::abs(sest);
  if (sest == 0.0) {
    double sine = 1.0, cosine = 0.0;
    if (std::max(absgam, absalp) != 0.0) {
      sine   = -gamma;
      cosine = alpha;
    }
    const double s1 = std::max(std::abs(sine), std::abs(cosine));
    double       s = sine / s1, c = cosine / s1;
    const double t = std::sqrt(s * s + c * c);
    return {0.0, s / t, c / t};
  }
  if (absgam <= kEps * absest) return {absgam, 0.0, 1.0};
  if (absalp <= kEps * absest) {
    if (absgam <= absest) return {absgam, 0.0, 1.0};
    return {absest, 1.0, 0.0};
  }
  if (absest <= kEps * absalp || absest <= kEps * absgam) {
    if (absgam <= absalp) {
      const double t = absgam / absalp, c = std::sqrt(1.0 + t * t);
      return {absest * (t / c), -(gamma / absalp) / c, sign_of(1.0, alpha) / c};
    }
    const double t = absalp / absgam, s = std::sqrt(1.0 + t * t);
    return {absest / s, -sign_of(1.0, gamma) / s, (alpha / absgam) / s};
  }
  const double zeta1 = alpha / absest, zeta2 = gamma / absest;
  const double norma = std::max(1.0 + zeta1 * zeta1 + std::abs(zeta1 * zeta2),
                                std::abs(zeta1 * zeta2) + zeta2 * zeta2);
  const double test  = 1.0 + 2.0 * (zeta1 - zeta2) * (zeta1 + zeta2);
  double       sine, cosine, est;
  if (test >= 0.0) {
    const double b = (zeta1 * zeta1 + zeta2 * zeta2 + 1.0) * 0.5, c = zeta2 * zeta2;
    const double t = c / (b + std::sqrt(std::abs(b * b - c)));
    sine           = zeta1 / (1.0 - t);
    cosine         = -zeta2 / t;
    est            = std::sqrt(t + 4.0 * kEps * kEps * norma) * absest;
  } else {
    const double b = (zeta2 * zeta2 + zeta1 * zeta1 - 1.0) * 0.5, c = zeta1 * zeta1;
    const double t = b >= 0.0 ? -c / (b + std::sqrt(b * b + c)) : b - std::sqrt(b * b + c);
    sine           = -zeta1 / t;
    cosine         = -zeta2 / (1.0 + t);
    est            = std::sqrt(1.0 + t + 4.0 * kEps * kEps * norma) * absest;
  }
  const double nrm = std::sqrt(sine * sine + cosine * cosine);
  return {est, sine / nrm, cosine / nrm};
}

}  // namespace

IceUpdate ice_update(IceJob job, std::span<const double> x, double sest,
                     std::span<const double> w, double gamma) {
  const double alpha = dot(x, w);
  return job == IceJob::largest ? largest(alpha, sest, gamma) : smallest(alpha, sest, gamma);
}

void IncrementalCondition::reset() {
  xmax_.clear();
  xmin_.clear();
  smax_ = smin_ = 0.0;
}

std::pair<double, double> IncrementalCondition::peek(std::span<const double> col) const {
  const std::size_t k = xmax_.size();
  if (col.size() != k + 1) throw DimensionError("IncrementalCondition: column length");
  if (k == 0) return {std::abs(col[0]), std::abs(col[0])};
  const auto w  = col.first(k);
  const auto up = ice_update(IceJob::largest, xmax_, smax_, w, col[k]);
  const auto lo = ice_update(IceJob::smallest, xmin_, smin_, w, col[k]);
  return {up.sest, lo.sest};
}

void IncrementalCondition::push_column(std::span<const double> col) {
  const std::size_t k = xmax_.size();
  if (col.size() != k + 1) throw DimensionError("IncrementalCondition: column length");
  if (k == 0) {
    smax_ = smin_ = std::abs(col[0]);
    xmax_.push_back(1.0);
    xmin_.push_back(1.0);
    return;
  }
  const auto w  = col.first(k);
  const auto up = ice_update(IceJob::largest, xmax_, smax_, w, col[k]);
  const auto lo = ice_update(IceJob::smallest, xmin_, smin_, w, col[k]);
  for (auto &v : xmax_) v *= up.s;
  xmax_.push_back(up.c);
  for (auto &v : xmin_) v *= lo.s;
  xmin_.push_back(lo.c);
  smax_ = up.sest;
  smin_ = lo.sest;
}

double IncrementalCondition::kappa() const noexcept {
  if (xmax_.empty()) return 1.0;
  if (smin_ == 0.0) return std::numeric_limits<double>::infinity();
  return smax_ / smin_;
}

}  // namespace hifir
