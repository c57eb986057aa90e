// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Ridge-regularized canonical correlation analysis.
//
// With centred views X (n x dx) and Y (n x dy):
//   Cxx = X'X/(n-1) + ridge I,  Cyy = Y'Y/(n-1) + ridge I,  Cxy = X'Y/(n-1)
//   T   = Cxx^{-1/2} Cxy Cyy^{-1/2} = U S V'
//   Wx  = Cxx^{-1/2} U_d,  Wy = Cyy^{-1/2} V_d,  correlations = diag(S)_d
// Throughout the library X is the visual view and Y the textual one.

#ifndef TEXT2ART_MODELS_CCA_HPP
#define TEXT2ART_MODELS_CCA_HPP

#include <Eigen/Dense>

#include <string>

#include "text2art/error.hpp"
#include "text2art/numeric.hpp"

namespace text2art {

struct CcaModel {
  Vector mean_x, mean_y;
  Matrix wx;  // dx x d
  Matrix wy;  // dy x d
  Vector correlations;  // descending
  double ridge = 1e-4;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(correlations.size()); }
};

namespace detail {

// Symmetric inverse square root; refuses matrices that are not safely
// positive definite.
inline Matrix inverse_sqrt_spd(const Matrix& c, const char* which) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  if (eig.info() != Eigen::Success)
    throw NumericError(std::string("fit_cca: eigendecomposition of ") + which + " failed");
  const Vector& lambda = eig.eigenvalues();
  const double top = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (!(lambda.minCoeff() > 1e-12 * top))
    throw NumericError(std::string("fit_cca: ") + which +
                       " covariance is singular; increase the ridge");
  const Vector inv_sqrt = lambda.array().rsqrt().matrix();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

inline CcaModel fit_cca(const Matrix& X, const Matrix& Y, std::size_t d, double ridge = 1e-4) {
  const Eigen::Index n = X.rows();
  if (Y.rows() != n) throw ArgumentError("fit_cca: X and Y need the same number of rows");
  if (n < 2) throw ArgumentError("fit_cca: need at least two samples");
  if (ridge < 0) throw ArgumentError("fit_cca: ridge must be non-negative");
  const auto max_d = std::min({X.cols(), Y.cols(), n - 1});
  if (d == 0 || static_cast<Eigen::Index>(d) > max_d)
    throw ArgumentError("fit_cca: d=" + std::to_string(d) + " must be in [1, " +
                        std::to_string(max_d) + "]");

  CcaModel m;
  m.ridge = ridge;
  m.mean_x = X.colwise().mean().transpose();
  m.mean_y = Y.colwise().mean().transpose();
  const Matrix xc = X.rowwise() - m.mean_x.transpose();
  const Matrix yc = Y.rowwise() - m.mean_y.transpose();
  const double scale = 1.0 / static_cast<double>(n - 1);

  Matrix cxx = scale * xc.transpose() * xc;
  Matrix cyy = scale * yc.transpose() * yc;
  const Matrix cxy = scale * xc.transpose() * yc;
  cxx.diagonal().array() += ridge;
  cyy.diagonal().array() += ridge;

  const Matrix kx = detail::inverse_sqrt_spd(cxx, "X");
  const Matrix ky = detail::inverse_sqrt_spd(cyy, "Y");
  const Matrix t = kx * cxy * ky;
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto dd = static_cast<Eigen::Index>(d);
  m.wx = kx * svd.matrixU().leftCols(dd);
  m.wy = ky * svd.matrixV().leftCols(dd);
  m.correlations = svd.singularValues().head(dd);
  return m;
}

enum class CcaSide { kVisual, kText };

/// Unit projection, or the zero vector with `degenerate` set when the input
/// projects to ~0 (e.g. it equals the training mean).
struct Projection {
  Vector values;
  bool degenerate = false;
};

inline Projection cca_project(const CcaModel& model, const Vector& x, CcaSide side) {
  const Matrix& w = side == CcaSide::kVisual ? model.wx : model.wy;
  const Vector& mean = side == CcaSide::kVisual ? model.mean_x : model.mean_y;
  if (x.size() != mean.size())
    throw ArgumentError("cca_project: input has dim " + std::to_string(x.size()) + ", expected " +
                        std::to_string(mean.size()));
  Vector z = w.transpose() * (x - mean);
  const double n = z.norm();
  if (!(n > kNormEpsilon)) return {Vector::Zero(z.size()), true};
  return {z / n, false};
}

}  // namespace text2art

#endif  // TEXT2ART_MODELS_CCA_HPP
