#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "aad/detectors/anomaly_map.hpp"
#include "aad/features/pyramid.hpp"

namespace aad::detectors {

// One multivariate Gaussian per patch position.
struct GaussianField {
  std::size_t height = 0, width = 0, dim = 0;
  double epsilon = 0.01;
  std::vector<double> mean;       // positions x dim
  std::vector<double> precision;  // positions x dim x dim, row-major per position

  std::size_t positions() const noexcept { return height * width; }

  std::span<const double> mean_at(std::size_t p) const { return {mean.data() + p * dim, dim}; }
  std::span<const double> precision_at(std::size_t p) const {
    return {precision.data() + p * dim * dim, dim * dim};
  }

  friend bool operator==(const GaussianField&, const GaussianField&) = default;
};

inline constexpr double kDefaultPadimEpsilon = 0.01;

// Sample mean and (n-1) covariance per position; precision = (cov + eps*I)^-1.
inline GaussianField padim_fit(std::span<const Tensor3<float>> train, double epsilon = kDefaultPadimEpsilon) {
  require(train.size() >= 2, Errc::statistics,
          "PaDiM needs at least 2 training grids, got " + std::to_string(train.size()));
  require(epsilon > 0.0 && std::isfinite(epsilon), Errc::parameter, "epsilon must be positive");
  const auto& ref = train.front();
  for (const auto& g : train)
    require(g.same_shape(ref), Errc::shape, "training grids differ in shape");

  GaussianField f;
  f.height = ref.height();
  f.width = ref.width();
  f.dim = ref.channels();
  f.epsilon = epsilon;
  f.mean.resize(f.positions() * f.dim);
  f.precision.resize(f.positions() * f.dim * f.dim);

  const auto n = static_cast<Eigen::Index>(train.size());
  const auto c = static_cast<Eigen::Index>(f.dim);
  Eigen::MatrixXd x(n, c);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(c, c);
  for (std::size_t p = 0; p < f.positions(); ++p) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto v = train[static_cast<std::size_t>(i)].vec(p);
      for (Eigen::Index k = 0; k < c; ++k) x(i, k) = v[static_cast<std::size_t>(k)];
    }
    const Eigen::RowVectorXd mu = x.colwise().mean();
    x.rowwise() -= mu;
    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    cov += epsilon * eye;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      fail(Errc::numerical, "covariance not positive definite at position (" +
                                std::to_string(p / f.width) + ", " + std::to_string(p % f.width) + ")");
    Eigen::MatrixXd prec = llt.solve(eye);
    prec = 0.5 * (prec + prec.transpose()).eval();
    std::copy(mu.data(), mu.data() + c, f.mean.begin() + static_cast<std::ptrdiff_t>(p * f.dim));
    for (Eigen::Index r = 0; r < c; ++r)
      for (Eigen::Index k = 0; k < c; ++k)
        f.precision[p * f.dim * f.dim + static_cast<std::size_t>(r * c + k)] = prec(r, k);
  }
  return f;
}

// Mahalanobis distance of one vector at position p.
inline double mahalanobis(std::span<const float> x, const GaussianField& f, std::size_t p) {
  const auto mu = f.mean_at(p);
  const auto prec = f.precision_at(p);
  thread_local std::vector<double> d;
  d.resize(f.dim);
  for (std::size_t k = 0; k < f.dim; ++k) d[k] = static_cast<double>(x[k]) - mu[k];
  double q = 0.0;
  for (std::size_t r = 0; r < f.dim; ++r) {
    const double* row = prec.data() + r * f.dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < f.dim; ++k) acc += row[k] * d[k];
    q += d[r] * acc;
  }
  return std::sqrt(std::max(0.0, q));
}

inline AnomalyMap padim_score(const Tensor3<float>& grid, const GaussianField& f) {
  require(grid.height() == f.height && grid.width() == f.width && grid.channels() == f.dim,
          Errc::shape,
          "grid " + std::to_string(grid.height()) + "x" + std::to_string(grid.width()) + "x" +
              std::to_string(grid.channels()) + " does not match PaDiM model " +
              std::to_string(f.height) + "x" + std::to_string(f.width) + "x" + std::to_string(f.dim));
  AnomalyMap m;
  m.detector = "padim";
  m.values = Matrix<double>(f.height, f.width);
  for (std::size_t p = 0; p < f.positions(); ++p)
    m.values.data()[p] = mahalanobis(grid.vec(p), f, p);
  return m;
}

}  // namespace aad::detectors
