#include "gfad/solvers.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <cmath>
#include <string>

namespace gfad {

Algorithm parse_algorithm(std::string_view name) {
    if (name == "ista") return Algorithm::ista;
    if (name == "fista") return Algorithm::fista;
    if (name == "amp") return Algorithm::amp;
    throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected ista|fista|amp)");
}

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::ista: return "ista";
    case Algorithm::fista: return "fista";
    case Algorithm::amp: return "amp";
    }
    return "?";
}

int default_iterations(Algorithm a) {
    switch (a) {
    case Algorithm::ista: return 235;
    case Algorithm::fista: return 100;
    case Algorithm::amp: return 18;
    }
    return 1;
}

SolverConfig SolverConfig::defaults(Algorithm a) {
    SolverConfig cfg;
    cfg.algorithm = a;
    cfg.max_iters = default_iterations(a);
    return cfg;
}

void SolverConfig::validate() const {
    if (max_iters < 1) throw ConfigError("solver: iterations must be >= 1");
    if (!(step_scale >= 1.0)) throw ConfigError("solver: step_scale must be >= 1");
    if (!(amp_alpha > 0.0)) throw ConfigError("solver: amp_alpha must be > 0");
}

double spectral_step(const Eigen::MatrixXcd& S, double tol, int max_iters) {
    if (S.size() == 0 || S.norm() == 0.0) throw NumericError("spectral_step: zero matrix");
    auto rng = make_engine(0x5eed, "power_iteration");
    Eigen::VectorXcd v(S.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_normal(rng);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXcd w = S.adjoint() * (S * v);
        const double next = v.dot(w).real();
        const double nrm = w.norm();
        if (nrm == 0.0) throw NumericError("spectral_step: start vector in the null space");
        v = w / nrm;
        if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
        lambda = next;
    }
    throw NumericError("spectral_step: power iteration did not converge");
}

Eigen::MatrixXcd group_soft_threshold(const Eigen::MatrixXcd& U, double threshold) {
    Eigen::MatrixXcd out(U.rows(), U.cols());
    for (Eigen::Index k = 0; k < U.rows(); ++k) {
        const double nrm = U.row(k).norm();
        if (nrm > threshold)
            out.row(k) = U.row(k) * ((nrm - threshold) / nrm);
        else
            out.row(k).setZero();
    }
    return out;
}

double group_lasso_objective(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S,
                             const Eigen::MatrixXcd& X, double lambda) {
    return 0.5 * (Y - S * X).squaredNorm() + lambda * X.rowwise().norm().sum();
}

double default_lambda(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S) {
    const Eigen::MatrixXcd C = S.adjoint() * Y;
    double best = 0.0;
    for (Eigen::Index k = 0; k < S.cols(); ++k)
        best = std::max(best, C.row(k).norm() / S.col(k).squaredNorm());
    return 0.1 * best;
}

namespace {

void check_dims(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S) {
    if (Y.rows() != S.rows())
        throw MismatchError("solver: Y has " + std::to_string(Y.rows()) + " rows, S has " +
                            std::to_string(S.rows()));
}

Eigen::VectorXd row_energy(const Eigen::MatrixXcd& X) { return X.rowwise().squaredNorm(); }

} // namespace

SparseEstimate ista(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg) {
    cfg.validate();
    check_dims(Y, S);
    const double lambda = cfg.lambda < 0.0 ? default_lambda(Y, S) : cfg.lambda;
    const double c = cfg.step_scale * spectral_step(S);
    SparseEstimate est;
    est.X = Eigen::MatrixXcd::Zero(S.cols(), Y.cols());
    est.objective.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
    est.objective.push_back(group_lasso_objective(Y, S, est.X, lambda));
    for (int it = 0; it < cfg.max_iters; ++it) {
        const Eigen::MatrixXcd G = S.adjoint() * (Y - S * est.X);
        est.X = group_soft_threshold(est.X + G / c, lambda / c);
        est.objective.push_back(group_lasso_objective(Y, S, est.X, lambda));
    }
    est.scores = row_energy(est.X);
    return est;
}

SparseEstimate fista(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg) {
    cfg.validate();
    check_dims(Y, S);
    const double lambda = cfg.lambda < 0.0 ? default_lambda(Y, S) : cfg.lambda;
    const double c = cfg.step_scale * spectral_step(S);
    SparseEstimate est;
    est.X = Eigen::MatrixXcd::Zero(S.cols(), Y.cols());
    Eigen::MatrixXcd Z = est.X;
    double t = 1.0;
    est.objective.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
    est.objective.push_back(group_lasso_objective(Y, S, est.X, lambda));
    for (int it = 0; it < cfg.max_iters; ++it) {
        const Eigen::MatrixXcd G = S.adjoint() * (Y - S * Z);
        Eigen::MatrixXcd next = group_soft_threshold(Z + G / c, lambda / c);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        Z = next + ((t - 1.0) / t_next) * (next - est.X);
        est.X = std::move(next);
        t = t_next;
        est.objective.push_back(group_lasso_objective(Y, S, est.X, lambda));
    }
    est.scores = row_energy(est.X);
    return est;
}

SparseEstimate amp(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg) {
    cfg.validate();
    check_dims(Y, S);
    const auto L = static_cast<double>(S.rows());
    const auto N = static_cast<double>(Y.cols());
    const Eigen::VectorXd col_norm = S.colwise().norm().transpose();
    if ((col_norm.array() <= 0.0).any()) throw NumericError("amp: zero pilot column");
    const Eigen::MatrixXcd A = S * col_norm.cwiseInverse().asDiagonal();

    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(S.cols(), Y.cols());
    Eigen::MatrixXcd R = Y;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const double sigma = R.norm() / std::sqrt(L * N);
        if (!std::isfinite(sigma)) throw NumericError("amp: residual diverged");
        const double theta = cfg.amp_alpha * sigma;
        const Eigen::MatrixXcd U = X + A.adjoint() * R;
        double div = 0.0;
        for (Eigen::Index k = 0; k < U.rows(); ++k) {
            const double nrm = U.row(k).norm();
            if (nrm > theta) div += 1.0 - theta / nrm * (1.0 - 1.0 / (2.0 * N));
        }
        X = group_soft_threshold(U, theta);
        R = Y - A * X + (div / L) * R;
    }
    if (!std::isfinite(R.norm())) throw NumericError("amp: residual diverged");
    SparseEstimate est;
    est.X = col_norm.cwiseInverse().asDiagonal() * X;
    est.scores = row_energy(est.X);
    return est;
}

SparseEstimate solve(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg) {
    switch (cfg.algorithm) {
    case Algorithm::ista: return ista(Y, S, cfg);
    case Algorithm::fista: return fista(Y, S, cfg);
    case Algorithm::amp: return amp(Y, S, cfg);
    }
    throw ConfigError("solver: unknown algorithm");
}

Eigen::VectorXd baseline_scores(const AccessSlot& slot, const PilotCodebook& codebook,
                                const ClusterAssignment& clusters, const LargeScaleMap& lsf,
                                const SolverConfig& cfg, BaselineAggregation aggregation) {
    const int K = codebook.num_devices();
    if (slot.activity.num_devices() != K || clusters.num_devices() != K)
        throw MismatchError("baseline: codebook, slot and clusters disagree on K");
    if (slot.pilot_len != codebook.pilot_len()) throw MismatchError("baseline: pilot length mismatch");

    std::vector<char> needed(static_cast<std::size_t>(slot.num_aps), 0);
    for (const auto& c : clusters.members) {
        if (aggregation == BaselineAggregation::dominant_ap)
            needed[static_cast<std::size_t>(c.front())] = 1;
        else
            for (int m : c) needed[static_cast<std::size_t>(m)] = 1;
    }
    std::vector<Eigen::VectorXd> per_ap(static_cast<std::size_t>(slot.num_aps));
    for (int m = 0; m < slot.num_aps; ++m)
        if (needed[static_cast<std::size_t>(m)])
            per_ap[static_cast<std::size_t>(m)] = solve(slot.block_d(m), codebook.S, cfg).scores;

    Eigen::VectorXd out(K);
    for (int k = 0; k < K; ++k) {
        const auto& c = clusters.members[static_cast<std::size_t>(k)];
        if (aggregation == BaselineAggregation::dominant_ap) {
            out(k) = per_ap[static_cast<std::size_t>(c.front())](k);
            continue;
        }
        double total = 0.0;
        for (int m : c) total += lsf.beta_linear(m, k);
        double acc = 0.0;
        for (int m : c) acc += lsf.beta_linear(m, k) / total * per_ap[static_cast<std::size_t>(m)](k);
        out(k) = acc;
    }
    return out;
}

} // namespace gfad
