/*
 Copyright 2026 The oed Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <Eigen/Dense>

#include "oed/errors.hpp"

namespace oed {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Gaussian belief over the parameter vector (prior or posterior).
struct GaussianBelief {
    Vec mean;
    Mat cov;

    int dim() const { return static_cast<int>(mean.size()); }

    // Rejects non-symmetric or non-positive-definite covariances.
    void validate() const {
        if (cov.rows() != cov.cols() || cov.rows() != mean.size())
            throw DimensionMismatch("belief covariance must be p x p with p = mean size");
        const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw SingularCovariance("covariance not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(cov);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw SingularCovariance("covariance not positive definite");
    }
};

}  // namespace oed
