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

#include <cstdint>

#include "oed/belief.hpp"
#include "oed/system.hpp"

namespace oed {

struct PosteriorUpdate {
    GaussianBelief belief;
    Mat S2;                       // T (sigma sigma^T)^{-1}
    double information_gain = 0;  // log det Sigma_prior - log det Sigma_post
};

struct EoptDirection {
    Vec V;       // unit vector along the prior's largest-variance direction
    double gap;  // relative separation to the next eigenvalue
};

/// S^2 = T (sigma sigma^T)^{-1}.
Mat noise_precision(const LinearParamSystem& sys);

/// Linear-Gaussian update from the averaged measurement:
///   Sigma_post = (Y^T S^2 Y + Sigma_prior^{-1})^{-1}
///   theta_post = Sigma_post (Y^T S^2 (y_avg - Y0) + Sigma_prior^{-1} theta_prior)
PosteriorUpdate posterior_update(const GaussianBelief& prior, const Vec& Y0, const Mat& Y,
                                 const LinearParamSystem& sys, const Vec& y_avg);

/// Tr(Sigma_prior^{1/2} Y^T S^2 Y Sigma_prior^{1/2}), the trace-relaxed
/// design objective.
double trace_objective(const GaussianBelief& prior, const Mat& Y,
                       const LinearParamSystem& sys);

/// Unit eigenvector for the smallest eigenvalue of Sigma_prior^{-1}; rejects
/// near-multiple top eigenvalues instead of tie-breaking.
EoptDirection eopt_direction(const GaussianBelief& prior);

/// Averaged measurement at theta_true: time-average of C x plus a noise draw
/// from N(0, sigma sigma^T / T) using the seeded counter generator.
Vec simulate_measurement(const LinearParamSystem& sys, const Discretization& disc,
                         const Vec& theta_true, const ControlGrid& u, std::uint64_t seed);

}  // namespace oed
