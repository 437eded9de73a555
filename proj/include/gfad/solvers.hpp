#pragma once

// Sparse MMV recovery baselines: ISTA, FISTA and AMP on the group LASSO.

#include "gfad/detection.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace gfad {

enum class Algorithm { ista, fista, amp };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);

/// Iteration budgets used by default (235 / 100 / 18).
int default_iterations(Algorithm a);

struct SolverConfig {
    Algorithm algorithm = Algorithm::ista;
    int max_iters = 235;
    /// Negative selects the data-scaled default.
    double lambda = -1.0;
    /// Step is 1 / (step_scale * sigma_max(S)^2).
    double step_scale = 1.0;
    /// AMP threshold multiplier on the residual standard deviation.
    double amp_alpha = 1.4;
    std::uint64_t seed = 0;

    static SolverConfig defaults(Algorithm a);
    void validate() const;
};

struct SparseEstimate {
    Eigen::MatrixXcd X;
    /// Objective at X = 0 followed by one value per iteration (ISTA/FISTA).
    std::vector<double> objective;
    /// Row energies ||x_k||^2.
    Eigen::VectorXd scores;
};

/// sigma_max(S)^2 by power iteration on S^H S.
double spectral_step(const Eigen::MatrixXcd& S, double tol = 1e-8, int max_iters = 500);

/// Row-wise shrinkage: each row keeps its direction, its norm becomes
/// max(0, norm - threshold).
Eigen::MatrixXcd group_soft_threshold(const Eigen::MatrixXcd& U, double threshold);

double group_lasso_objective(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S,
                             const Eigen::MatrixXcd& X, double lambda);

/// 0.1 * max_k ||s_k^H Y|| / ||s_k||^2.
double default_lambda(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S);

SparseEstimate ista(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg);
SparseEstimate fista(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg);
SparseEstimate amp(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg);
SparseEstimate solve(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& S, const SolverConfig& cfg);

enum class BaselineAggregation { cluster_weighted, dominant_ap };

/// Solves per AP and combines the row energies of each device's cluster with
/// normalized linear-beta weights (or takes the dominant AP only).
Eigen::VectorXd baseline_scores(const AccessSlot& slot, const PilotCodebook& codebook,
                                const ClusterAssignment& clusters, const LargeScaleMap& lsf,
                                const SolverConfig& cfg,
                                BaselineAggregation aggregation = BaselineAggregation::cluster_weighted);

} // namespace gfad
