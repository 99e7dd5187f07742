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

#include "oed/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oed {

namespace {

double node_weight(int k, int K) { return (k == 0 || k == K) ? 0.5 : 1.0; }

// Node covector whose interval averages equal -lambda_k^T Gamma, so that
// (dt/T)(psi_bar + p_bar B) reproduces the discrete gradient exactly.
Mat covector_from_adjoint(const Mat& path, const Mat* W, double alpha, const Mat& Phi,
                          const Mat& Gamma, int K) {
    const int dim = static_cast<int>(Phi.rows());
    const Mat PhiT = Phi.transpose();
    Mat p = Mat::Zero(K + 1, dim);
    Vec lambda = Vec::Zero(dim);
    for (int k = K - 1; k >= 0; --k) {
        const Vec xk1 = path.row(k + 1).transpose();
        lambda = PhiT * lambda + (2.0 * alpha * node_weight(k + 1, K)) * (W ? (*W * xk1).eval() : xk1);
        p.row(k) = -2.0 * (Gamma.transpose() * lambda).transpose() - p.row(k + 1);
    }
    return p;
}

// Combined second derivative S sum_j V_j ddpsi_j of the design kernel.
Mat combined_ddpsi(const PsiFamily& fam, const Vec& V) {
    Mat dd = Mat::Zero(fam.psi.rows(), fam.psi.cols());
    for (int j = 0; j < V.size(); ++j) dd += V(j) * fam.ddpsi_j[j + 1];
    return fam.S * dd;
}

struct NodeTerms {
    Vec pA2B;   // m entries, <p A^2 B^i>
    Vec xAB;    // m entries, <x^T (A - A^T) B^i>
};

NodeTerms node_terms(const LinearParamSystem& sys, const Weighting& weighting,
                     const CovectorData& data, int node) {
    const int m = sys.m();
    NodeTerms t{Vec::Zero(m), Vec::Zero(m)};
    if (weighting.is_single()) {
        const Mat Bbar = sys.input_matrix(std::get<Vec>(weighting.value));
        const Eigen::RowVectorXd pk = data.covector.row(node);
        const Eigen::RowVectorXd xk = data.state.row(node);
        t.pA2B = (pk * sys.A * sys.A * Bbar).transpose();
        t.xAB = (xk * (sys.A - sys.A.transpose()) * Bbar).transpose();
    } else if (weighting.is_atoms()) {
        const AtomicPrior& atoms = std::get<AtomicPrior>(weighting.value);
        const Mat skew = sys.A - sys.A.transpose();
        for (int a = 0; a < atoms.size(); ++a) {
            const Mat Ba = sys.input_matrix(atoms.atoms.row(a).transpose());
            const Eigen::RowVectorXd pk = data.atom_covectors[a].row(node);
            const Eigen::RowVectorXd xk = data.atom_states[a].row(node);
            t.pA2B += atoms.weights(a) * (pk * sys.A * sys.A * Ba).transpose();
            t.xAB += atoms.weights(a) * (xk * skew * Ba).transpose();
        }
    } else {
        const AugmentedSystem aug =
            augment_ensemble_system(sys, std::get<GaussianBelief>(weighting.value));
        const Eigen::RowVectorXd xik = data.covector.row(node);
        const Eigen::RowVectorXd zk = data.state.row(node);
        t.pA2B = (xik * aug.Atilde * aug.Atilde * aug.Btilde).transpose();
        t.xAB = (zk * aug.Qbar * (aug.Atilde - aug.Atilde.transpose()) * aug.Btilde).transpose();
    }
    return t;
}

}  // namespace

Mat integrate_covector(const LinearParamSystem& sys, const Discretization& disc,
                       const Mat& x_path, double alpha) {
    if (x_path.rows() != disc.K + 1 || x_path.cols() != sys.n())
        throw DimensionMismatch("state path must be (K+1) x n");
    return covector_from_adjoint(x_path, nullptr, alpha, disc.Phi, disc.Gamma, disc.K);
}

CovectorData compute_covector_data(const LinearParamSystem& sys, const Discretization& disc,
                                   const Weighting& weighting, const ControlGrid& u,
                                   double alpha) {
    CovectorData data;
    data.products = Mat::Zero(disc.K + 1, sys.m());
    if (weighting.is_single()) {
        const Vec& theta = std::get<Vec>(weighting.value);
        data.state = simulate_trajectory(sys, disc, theta, u);
        data.covector = integrate_covector(sys, disc, data.state, alpha);
        data.products = data.covector * sys.input_matrix(theta);
    } else if (weighting.is_atoms()) {
        const AtomicPrior& atoms = std::get<AtomicPrior>(weighting.value);
        atoms.validate();
        for (int a = 0; a < atoms.size(); ++a) {
            const Vec theta = atoms.atoms.row(a).transpose();
            Mat x = simulate_trajectory(sys, disc, theta, u);
            Mat p = integrate_covector(sys, disc, x, alpha);
            data.products += atoms.weights(a) * p * sys.input_matrix(theta);
            data.atom_states.push_back(std::move(x));
            data.atom_covectors.push_back(std::move(p));
        }
    } else {
        const GaussianBelief& prior = std::get<GaussianBelief>(weighting.value);
        const AugmentedSystem aug = augment_ensemble_system(sys, prior);
        const Discretization disc_aug = augment_discretization(disc, sys.p());
        data.state = simulate_augmented(aug, disc_aug, u);
        data.covector = covector_from_adjoint(data.state, &aug.Qbar, alpha, disc_aug.Phi,
                                              disc_aug.Gamma, disc.K);
        data.products = data.covector * aug.Btilde;
    }
    return data;
}

Mat switching_functions(const PsiFamily& fam, const Mat& products) {
    if (products.rows() != fam.psi.rows() || products.cols() != fam.psi.cols())
        throw DimensionMismatch("covector products do not match the kernel grid");
    return products + fam.psi;
}

std::vector<std::vector<Arc>> classify_arcs(const Mat& switching, const ControlGrid& u,
                                            double delta_sw) {
    const int K = u.K();
    const int m = u.channels();
    if (switching.rows() != K + 1 || switching.cols() != m)
        throw DimensionMismatch("switching array must be (K+1) x m");

    // Arcs live on the control intervals; the interval average of phi is the
    // quantity the discrete maximum condition actually constrains.
    std::vector<std::vector<Arc>> arcs(m);
    for (int i = 0; i < m; ++i) {
        const double scale = switching.col(i).cwiseAbs().maxCoeff();
        const double thresh = delta_sw * scale;

        // Label intervals: 0 near-zero, +1/-1 bang; sign(0) inherits the
        // previous label once the threshold degenerates to zero.
        std::vector<int> label(K);
        for (int k = 0; k < K; ++k) {
            const double v = 0.5 * (switching(k, i) + switching(k + 1, i));
            if (std::abs(v) <= thresh)
                label[k] = 0;
            else
                label[k] = v > 0.0 ? 1 : -1;
            if (thresh == 0.0 && v == 0.0 && k > 0) label[k] = label[k - 1];
        }

        int start = 0;
        for (int k = 1; k <= K; ++k) {
            if (k < K && label[k] == label[start]) continue;
            Arc arc;
            arc.first_node = start;
            arc.last_node = k;  // run of intervals [start, k-1] spans nodes start..k
            const int run = k - start;
            if (label[start] == 0)
                arc.label = run + 1 >= 3 ? ArcLabel::Singular : ArcLabel::Indeterminate;
            else
                arc.label = label[start] > 0 ? ArcLabel::BangPlus : ArcLabel::BangMinus;
            arcs[i].push_back(arc);
            start = k;
        }
    }
    return arcs;
}

double pmp_consistency(const Mat& switching, const ControlGrid& u, double delta_sw) {
    const int K = u.K();
    const int m = u.channels();
    long considered = 0;
    long matched = 0;
    for (int i = 0; i < m; ++i) {
        const double thresh = delta_sw * switching.col(i).cwiseAbs().maxCoeff();
        for (int k = 0; k < K; ++k) {
            const double phi = 0.5 * (switching(k, i) + switching(k + 1, i));
            if (std::abs(phi) <= thresh) continue;
            ++considered;
            if (phi * u.values(k, i) > 0.0) ++matched;
        }
    }
    return considered == 0 ? 1.0 : static_cast<double>(matched) / considered;
}

GramMatrices gram_matrices(const LinearParamSystem& sys, const GaussianBelief& prior,
                           const Vec& theta_nominal) {
    const int m = sys.m();
    GramMatrices g;
    const Mat Bbar = sys.input_matrix(theta_nominal);
    g.classical = Bbar.transpose() * Bbar;
    g.sigma = Mat(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            g.sigma(i, j) = (sys.param_columns(j).transpose() * sys.param_columns(i) *
                             prior.cov)
                                .trace();
    g.ensemble = g.classical + g.sigma;
    return g;
}

Mat weighting_gram(const LinearParamSystem& sys, const Weighting& weighting) {
    if (weighting.is_single()) {
        const Mat Bbar = sys.input_matrix(std::get<Vec>(weighting.value));
        return Bbar.transpose() * Bbar;
    }
    if (weighting.is_atoms()) {
        const AtomicPrior& atoms = std::get<AtomicPrior>(weighting.value);
        Mat g = Mat::Zero(sys.m(), sys.m());
        for (int a = 0; a < atoms.size(); ++a) {
            const Mat Ba = sys.input_matrix(atoms.atoms.row(a).transpose());
            g += atoms.weights(a) * Ba.transpose() * Ba;
        }
        return g;
    }
    const GaussianBelief& prior = std::get<GaussianBelief>(weighting.value);
    return gram_matrices(sys, prior, prior.mean).ensemble;
}

SingularSolve singular_feedback(const LinearParamSystem& sys, const Discretization& disc,
                                const DesignContext& ctx, const Weighting& weighting,
                                const CovectorData& data, int node,
                                const std::vector<int>& singular_channels,
                                const std::vector<std::pair<int, double>>& bang_channels) {
    const int k = static_cast<int>(singular_channels.size());
    if (k == 0) throw DimensionMismatch("no singular channels requested");
    if (node < 0 || node > disc.K) throw DimensionMismatch("node out of range");

    const Mat G = weighting_gram(sys, weighting);
    Mat Gs(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            Gs(a, b) = G(singular_channels[a], singular_channels[b]);
    Eigen::JacobiSVD<Mat> svd(Gs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12)
        throw SingularGram("tangency system condition number exceeds 1e12");

    const NodeTerms terms = node_terms(sys, weighting, data, node);
    const Mat ddpsi = combined_ddpsi(ctx.psi, ctx.V);
    const double inv2a = 1.0 / (2.0 * ctx.alpha);

    Vec rhs(k);
    for (int a = 0; a < k; ++a) {
        const int i = singular_channels[a];
        double r = -inv2a * terms.pA2B(i) + terms.xAB(i) - inv2a * ddpsi(node, i);
        for (const auto& [j, eps] : bang_channels) r -= eps * G(i, j);
        rhs(a) = r;
    }
    const Vec us = svd.solve(rhs);

    SingularSolve out;
    out.values = Vec::Zero(sys.m());
    for (int a = 0; a < k; ++a) {
        out.values(singular_channels[a]) = us(a);
        if (std::abs(us(a)) > 1.0) out.feasible = false;
    }
    return out;
}

std::pair<bool, double> legendre_clebsch_check(const Mat& gram, double alpha,
                                               const std::vector<int>& singular_channels) {
    if (alpha <= 0.0) throw DimensionMismatch("alpha must be positive");
    Mat G;
    if (singular_channels.empty()) {
        G = gram;
    } else {
        const int k = static_cast<int>(singular_channels.size());
        G.resize(k, k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                G(a, b) = gram(singular_channels[a], singular_channels[b]);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(2.0 * alpha * G);
    const double min_eig = es.eigenvalues().minCoeff();
    return {min_eig > 0.0, min_eig};
}

PmpReport build_pmp_report(const LinearParamSystem& sys, const Discretization& disc,
                           const DesignContext& ctx, const Weighting& weighting,
                           const ControlGrid& u, const GaussianBelief& prior,
                           const Vec& theta_nominal, double delta_sw) {
    PmpReport report;
    report.delta_sw = delta_sw;

    const CovectorData data = compute_covector_data(sys, disc, weighting, u, ctx.alpha);
    report.switching = switching_functions(ctx.psi, data.products);
    report.arcs = classify_arcs(report.switching, u, delta_sw);
    report.consistency = pmp_consistency(report.switching, u, delta_sw);
    report.gram = gram_matrices(sys, prior, theta_nominal);

    const Mat& lc_gram = weighting.is_single() ? report.gram.classical : report.gram.ensemble;
    std::tie(report.lc_pass, report.lc_min_eig) = legendre_clebsch_check(lc_gram, ctx.alpha, {});

    // Per-node singular feedback wherever some channel is inside a singular arc.
    std::vector<std::vector<bool>> is_singular(sys.m(), std::vector<bool>(disc.K + 1, false));
    for (int i = 0; i < sys.m(); ++i)
        for (const Arc& arc : report.arcs[i])
            if (arc.label == ArcLabel::Singular)
                for (int kk = arc.first_node; kk <= arc.last_node; ++kk)
                    is_singular[i][kk] = true;

    std::vector<Vec> rows;
    for (int kk = 0; kk <= disc.K; ++kk) {
        std::vector<int> sing;
        std::vector<std::pair<int, double>> bang;
        for (int i = 0; i < sys.m(); ++i) {
            if (is_singular[i][kk]) {
                sing.push_back(i);
            } else {
                const double phi = report.switching(kk, i);
                const double eps = phi != 0.0 ? (phi > 0.0 ? 1.0 : -1.0)
                                              : (u.values(std::min(kk, disc.K - 1), i) >= 0.0
                                                     ? 1.0
                                                     : -1.0);
                bang.emplace_back(i, eps);
            }
        }
        if (sing.empty()) continue;
        const SingularSolve solve =
            singular_feedback(sys, disc, ctx, weighting, data, kk, sing, bang);
        report.singular_nodes.push_back(kk);
        report.singular_feasible.push_back(solve.feasible);
        rows.push_back(solve.values);
    }
    report.singular_values = Mat::Zero(static_cast<int>(rows.size()), sys.m());
    for (std::size_t r = 0; r < rows.size(); ++r)
        report.singular_values.row(static_cast<int>(r)) = rows[r].transpose();
    return report;
}

}  // namespace oed
