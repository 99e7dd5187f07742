#include <doctest.h>

#include "helpers.hpp"

using namespace oed;
using namespace testutil;

namespace {

LinearParamSystem scalar_meas_system(double sigma, double T) {
    LinearParamSystem sys;
    sys.A = Mat::Zero(1, 1);
    sys.B = {Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 1.0)};
    sys.C = Mat::Constant(1, 1, 1.0);
    sys.sigma = Mat::Constant(1, 1, sigma);
    sys.T = T;
    return sys;
}

int numerical_rank(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    const double tol = 1e-10 * std::max(1.0, svd.singularValues().maxCoeff());
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    return rank;
}

}  // namespace

TEST_CASE("posterior: no measurement information keeps the prior") {
    const LinearParamSystem sys = scalar_meas_system(0.5, 1.0);
    GaussianBelief prior;
    prior.mean = Vec::Constant(1, 0.3);
    prior.cov = Mat::Constant(1, 1, 0.5);
    const PosteriorUpdate post = posterior_update(prior, Vec::Zero(1), Mat::Zero(1, 1), sys,
                                                  Vec::Constant(1, 0.7));
    CHECK(post.belief.mean(0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(post.belief.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(post.information_gain == doctest::Approx(0.0));
}

TEST_CASE("posterior: scalar hand example gives 1/3 and 1/12") {
    // T = 1, sigma = 0.5 so S^2 = 4; Y = 0.5, y_avg - Y0 = 0.125
    const LinearParamSystem sys = scalar_meas_system(0.5, 1.0);
    GaussianBelief prior;
    prior.mean = Vec::Zero(1);
    prior.cov = Mat::Constant(1, 1, 0.5);
    const PosteriorUpdate post = posterior_update(prior, Vec::Zero(1),
                                                  Mat::Constant(1, 1, 0.5), sys,
                                                  Vec::Constant(1, 0.125));
    CHECK(post.S2(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::abs(post.belief.cov(0, 0) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(post.belief.mean(0) - 1.0 / 12.0) < 1e-12);
    CHECK(post.information_gain > 0.0);
}

TEST_CASE("posterior rejects ill-conditioned priors") {
    const LinearParamSystem sys = scalar_meas_system(0.5, 1.0);
    GaussianBelief prior;
    prior.mean = Vec::Zero(2);
    prior.cov = (Mat(2, 2) << 1.0, 0.0, 0.0, 1e-14).finished();
    LinearParamSystem sys2 = sys;
    sys2.B = {sys.B[0], sys.B[1], Mat::Constant(1, 1, 2.0)};  // p = 2
    CHECK_THROWS_AS(
        posterior_update(prior, Vec::Zero(1), Mat::Ones(1, 2), sys2, Vec::Zero(1)),
        SingularCovariance);
}

TEST_CASE("posterior consistency: noiseless estimate lands between prior and truth") {
    CounterRng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const LinearParamSystem sys = scalar_meas_system(rand_in(rng, 0.2, 1.0),
                                                         rand_in(rng, 0.5, 4.0));
        GaussianBelief prior;
        prior.mean = Vec::Constant(1, rand_in(rng, -0.5, 0.5));
        prior.cov = Mat::Constant(1, 1, rand_in(rng, 0.1, 2.0));
        const double theta_true = prior.mean(0) + rand_in(rng, 0.2, 1.0);
        const double Y = rand_in(rng, 0.1, 1.0);
        const double Y0 = rand_in(rng, -1.0, 1.0);
        const Vec y_avg = Vec::Constant(1, Y0 + Y * theta_true);
        const PosteriorUpdate post = posterior_update(prior, Vec::Constant(1, Y0),
                                                      Mat::Constant(1, 1, Y), sys, y_avg);
        CHECK(post.belief.mean(0) > prior.mean(0));
        CHECK(post.belief.mean(0) < theta_true);
    }
}

TEST_CASE("posterior: Loewner order, information gain and rank bound") {
    CounterRng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int p = 1 + static_cast<int>(rng.next_u64() % n);
        const LinearParamSystem sys = random_system(rng, n, 1, p, rand_in(rng, 0.5, 3.0));
        const int K = 40;
        const Discretization disc = discretize(sys, K);
        const GaussianBelief prior = random_prior(rng, p);
        Vec V = random_matrix(rng, p, 1).col(0);
        V.normalize();
        const PsiFamily fam = compute_psi_family(sys, disc, V);
        const ControlGrid u = random_control(rng, K, 1, sys.T);
        const MeasurementMap map = compute_Y(sys, disc, fam, u);
        const Vec y_avg = Vec::Constant(1, rand_in(rng, -1.0, 1.0));

        const PosteriorUpdate post = posterior_update(prior, map.Y0, map.Y, sys, y_avg);
        Eigen::SelfAdjointEigenSolver<Mat> es(prior.cov - post.belief.cov);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
        CHECK(post.information_gain > -1e-10);
        CHECK(numerical_rank(map.Y.transpose() * post.S2 * map.Y) <= sys.q());
    }
}

TEST_CASE("posterior: rank bound holds for synthetic multi-output maps") {
    CounterRng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int q = 1 + static_cast<int>(rng.next_u64() % 3);
        const int p = q + static_cast<int>(rng.next_u64() % 3);
        LinearParamSystem sys;
        sys.A = Mat::Zero(p, p);
        for (int j = 0; j <= p; ++j) sys.B.push_back(Mat::Zero(p, 1));
        for (int j = 1; j <= p; ++j) sys.B[j](j - 1, 0) = 1.0;
        sys.C = random_matrix(rng, q, p);
        sys.sigma = random_spd(rng, q, 0.3, 1.0);
        sys.T = rand_in(rng, 0.5, 3.0);
        sys.validate();

        GaussianBelief prior = random_prior(rng, p);
        const Mat Y = random_matrix(rng, q, p);
        const Vec y = random_matrix(rng, q, 1).col(0);
        const PosteriorUpdate post = posterior_update(prior, Vec::Zero(q), Y, sys, y);
        CHECK(numerical_rank(Y.transpose() * post.S2 * Y) <= q);
        Eigen::SelfAdjointEigenSolver<Mat> es(prior.cov - post.belief.cov);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("trace objective: zero map, scalar value, identity prior") {
    const LinearParamSystem sys = scalar_meas_system(0.5, 1.0);  // S^2 = 4
    GaussianBelief prior;
    prior.mean = Vec::Zero(1);
    prior.cov = Mat::Constant(1, 1, 0.5);
    CHECK(trace_objective(prior, Mat::Zero(1, 1), sys) == doctest::Approx(0.0));
    CHECK(trace_objective(prior, Mat::Constant(1, 1, 0.5), sys) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // identity prior: the value reduces to S^2 |Y|_F^2
    CounterRng rng(31);
    LinearParamSystem sys2;
    sys2.A = Mat::Zero(2, 2);
    sys2.B = {Mat::Zero(2, 1), (Mat(2, 1) << 1.0, 0.0).finished(),
              (Mat(2, 1) << 0.0, 1.0).finished()};
    sys2.C = random_matrix(rng, 1, 2);
    sys2.sigma = Mat::Constant(1, 1, 0.7);
    sys2.T = 2.0;
    GaussianBelief iprior;
    iprior.mean = Vec::Zero(2);
    iprior.cov = Mat::Identity(2, 2);
    const Mat Y = random_matrix(rng, 1, 2);
    const double s2 = 2.0 / (0.7 * 0.7);
    CHECK(trace_objective(iprior, Y, sys2) ==
          doctest::Approx(s2 * Y.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("E-optimal direction: diagonal, scalar and brute-force cases") {
    GaussianBelief prior;
    prior.mean = Vec::Zero(2);
    prior.cov = (Mat(2, 2) << 2.0, 0.0, 0.0, 1.0).finished();
    const EoptDirection dir = eopt_direction(prior);
    CHECK(dir.V(0) == doctest::Approx(1.0));
    CHECK(std::abs(dir.V(1)) < 1e-14);
    CHECK(dir.gap == doctest::Approx(0.5));

    GaussianBelief scalar;
    scalar.mean = Vec::Zero(1);
    scalar.cov = Mat::Constant(1, 1, 0.37);
    CHECK(eopt_direction(scalar).V(0) == doctest::Approx(1.0));

    // brute force over random unit vectors
    CounterRng rng(41);
    GaussianBelief p3;
    p3.mean = Vec::Zero(3);
    p3.cov = random_spd(rng, 3, 0.2, 3.0);
    const EoptDirection d3 = eopt_direction(p3);
    const Mat prec = p3.cov.llt().solve(Mat::Identity(3, 3));
    Vec best = Vec::Zero(3);
    double best_val = 1e300;
    for (int s = 0; s < 100000; ++s) {
        Vec x(3);
        for (int i = 0; i < 3; ++i) x(i) = rng.next_gaussian();
        x.normalize();
        const double val = x.dot(prec * x);
        if (val < best_val) {
            best_val = val;
            best = x;
        }
    }
    const double cosine = std::abs(best.dot(d3.V));
    CHECK(std::acos(std::min(1.0, cosine)) < 0.05);
}

TEST_CASE("E-optimal direction rejects eigenvalue ties") {
    GaussianBelief prior;
    prior.mean = Vec::Zero(2);
    prior.cov = Mat::Identity(2, 2);
    CHECK_THROWS_AS(eopt_direction(prior), DegenerateEigenvalue);
}

TEST_CASE("measurement: vanishing noise returns the time average of Cx") {
    LinearParamSystem sys = scalar_meas_system(1e-12, 1.0);
    const Discretization disc = discretize(sys, 128);
    const ControlGrid u = ControlGrid::constant(128, 1, sys.T, 1.0);
    const Vec y = simulate_measurement(sys, disc, Vec::Constant(1, 0.25), u, 7);
    // x(t) = 1.25 t so the average is 0.625
    CHECK(std::abs(y(0) - 0.625) < 1e-9);
}

TEST_CASE("measurement: noise spread matches sigma/sqrt(T) (distributional)") {
    LinearParamSystem sys = oscillator_system(10.0);
    const Discretization disc = discretize(sys, 64);
    const ControlGrid u = ControlGrid::constant(64, 1, sys.T, 0.0);  // deterministic part 0
    const int N = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < N; ++s) {
        const Vec y = simulate_measurement(sys, disc, Vec::Zero(1), u, 1000 + s);
        sum += y(0);
        sum2 += y(0) * y(0);
    }
    const double mean = sum / N;
    const double sd = std::sqrt(sum2 / N - mean * mean);
    const double expected = 0.25 / std::sqrt(10.0);
    // sd of the sample sd is roughly expected/sqrt(2N)
    CHECK(std::abs(sd - expected) < 3.0 * expected / std::sqrt(2.0 * N));
    CHECK(std::abs(mean) < 3.0 * expected / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("measurement: identical seeds reproduce the draw") {
    LinearParamSystem sys = oscillator_system(10.0);
    const Discretization disc = discretize(sys, 32);
    const ControlGrid u = ControlGrid::constant(32, 1, sys.T, 0.5);
    const Vec a = simulate_measurement(sys, disc, Vec::Constant(1, 0.25), u, 99);
    const Vec b = simulate_measurement(sys, disc, Vec::Constant(1, 0.25), u, 99);
    const Vec c = simulate_measurement(sys, disc, Vec::Constant(1, 0.25), u, 100);
    CHECK(a(0) == b(0));
    CHECK(a(0) != c(0));
}
