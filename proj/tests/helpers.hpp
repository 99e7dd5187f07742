#pragma once

#include <cmath>

#include "oed/bayes.hpp"
#include "oed/objective.hpp"
#include "oed/rng.hpp"
#include "oed/system.hpp"

namespace testutil {

using oed::Mat;
using oed::Vec;

inline double rand_in(oed::CounterRng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_unit();
}

inline Mat random_matrix(oed::CounterRng& rng, int rows, int cols, double scale = 1.0) {
    Mat M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = scale * rand_in(rng, -1.0, 1.0);
    return M;
}

// Random SPD matrix with eigenvalues in [lo, hi].
inline Mat random_spd(oed::CounterRng& rng, int p, double lo = 0.3, double hi = 2.0) {
    const Mat G = random_matrix(rng, p, p);
    Eigen::HouseholderQR<Mat> qr(G);
    const Mat Q = qr.householderQ();
    Vec eigs(p);
    for (int i = 0; i < p; ++i) eigs(i) = rand_in(rng, lo, hi);
    return Q * eigs.asDiagonal() * Q.transpose();
}

// Shifts the spectrum left so the drift is strictly stable.
inline Mat random_stable_drift(oed::CounterRng& rng, int n) {
    Mat A = random_matrix(rng, n, n);
    const double abscissa = A.eigenvalues().real().maxCoeff();
    A -= (abscissa + 0.3) * Mat::Identity(n, n);
    return A;
}

inline oed::LinearParamSystem random_system(oed::CounterRng& rng, int n, int m, int p,
                                            double T, bool stable = false) {
    oed::LinearParamSystem sys;
    sys.A = stable ? random_stable_drift(rng, n) : random_matrix(rng, n, n, 0.7);
    for (int j = 0; j <= p; ++j) sys.B.push_back(random_matrix(rng, n, m));
    sys.C = random_matrix(rng, 1, n);
    sys.sigma = Mat::Constant(1, 1, rand_in(rng, 0.2, 1.0));
    sys.T = T;
    sys.validate();
    return sys;
}

inline oed::ControlGrid random_control(oed::CounterRng& rng, int K, int m, double T) {
    oed::ControlGrid u;
    u.T = T;
    u.values = random_matrix(rng, K, m);
    return u;
}

inline oed::GaussianBelief random_prior(oed::CounterRng& rng, int p) {
    oed::GaussianBelief prior;
    prior.mean = random_matrix(rng, p, 1).col(0) * 0.5;
    prior.cov = random_spd(rng, p);
    return prior;
}

inline Vec sample_theta(oed::CounterRng& rng, const oed::GaussianBelief& prior) {
    Eigen::LLT<Mat> llt(prior.cov);
    Vec g(prior.dim());
    for (int i = 0; i < prior.dim(); ++i) g(i) = rng.next_gaussian();
    return prior.mean + llt.matrixL() * g;
}

// Central finite differences of the discretized cost, entry by entry.
inline Mat fd_gradient(const oed::LinearParamSystem& sys, const oed::Discretization& disc,
                       const oed::DesignContext& ctx, const oed::Weighting& weighting,
                       const oed::ControlGrid& u, double h = 1e-5) {
    Mat g(u.K(), u.channels());
    oed::ControlGrid probe = u;
    for (int k = 0; k < u.K(); ++k)
        for (int i = 0; i < u.channels(); ++i) {
            const double base = u.values(k, i);
            probe.values(k, i) = base + h;
            const double fplus = oed::cost(sys, disc, ctx, weighting, probe);
            probe.values(k, i) = base - h;
            const double fminus = oed::cost(sys, disc, ctx, weighting, probe);
            probe.values(k, i) = base;
            g(k, i) = (fplus - fminus) / (2.0 * h);
        }
    return g;
}

// The kappa/delta damped oscillator used throughout: velocity measurement,
// one scalar parameter scaling the forcing.
inline oed::LinearParamSystem oscillator_system(double T) {
    oed::LinearParamSystem sys;
    sys.A = (Mat(2, 2) << 0.0, 1.0, -2.0, -0.25).finished();
    sys.B = {(Mat(2, 1) << 0.0, 1.0).finished(), (Mat(2, 1) << 0.0, 1.0).finished()};
    sys.C = (Mat(1, 2) << 0.0, 1.0).finished();
    sys.sigma = Mat::Constant(1, 1, 0.25);
    sys.T = T;
    return sys;
}

inline oed::GaussianBelief oscillator_prior() {
    oed::GaussianBelief prior;
    prior.mean = Vec::Zero(1);
    prior.cov = Mat::Constant(1, 1, 0.5);
    return prior;
}

inline oed::DesignContext make_context(const oed::LinearParamSystem& sys,
                                       const oed::Discretization& disc, const Vec& V,
                                       double alpha) {
    oed::DesignContext ctx;
    ctx.psi = oed::compute_psi_family(sys, disc, V);
    ctx.V = V;
    ctx.alpha = alpha;
    return ctx;
}

}  // namespace testutil
