#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shadowlab/certify.hpp"

namespace shadowlab {

/// One shadowing run inside a positive replication.
struct RunRecord {
    std::uint64_t seed = 0;
    double sigma = 0.0;
    double sup_dist = 0.0;
    double bound = 0.0;
    double residual = 0.0;
    double max_ratio = 0.0;
    int iterations = 0;
    bool strict_bound = true;
    bool passed = false;
};

struct ReplicationReport {
    std::string name;
    /// Positive examples: every run passed. Negative examples: the failure of
    /// the candidate constant is certified.
    bool success = false;
    std::optional<Certificate> certificate;
    std::vector<RunRecord> runs;
    /// Scalar findings specific to the example.
    nlohmann::json details = nlohmann::json::object();
    /// (file name, CSV text) pairs for trajectories worth keeping.
    std::vector<std::pair<std::string, std::string>> tables;

    [[nodiscard]] double pass_rate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    /// `key = value` lines.
    [[nodiscard]] std::string to_text() const;
};

/// Writes certificate.json, report.json, summary.txt, runs.csv and the tables.
void write_report(const ReplicationReport& report, const std::filesystem::path& dir, bool timestamp = true);

struct ReplicateOptions {
    int runs = 20;
    std::uint64_t seed = 20240101;
    double tol = 1e-10;
    /// Attempts per run before giving up on finding a contained pseudo-orbit.
    int max_attempts = 50;
};

/// x' = -(x + 1/2)^2 on B_rho(0) through the growth-bound certificate and
/// the Picard construction. Throws NotApplicableError for rho >= 1/2.
[[nodiscard]] ReplicationReport replicate_exm_positive(double rho, std::optional<double> delta_nbhd = std::nullopt,
                                                       const ReplicateOptions& opts = {});

/// The pseudosolution -1/2 + delta tanh(delta t) against every true solution
/// surviving on [0, T]; certifies that kappa_candidate fails.
[[nodiscard]] ReplicationReport replicate_exm_counterexample(double delta, double kappa_candidate, double T);

/// Log-norm route on H = [-rho, inf) with delta = (1/2 - rho) / 2.
[[nodiscard]] ReplicationReport replicate_revisited(double rho, const ReplicateOptions& opts = {});

/// c > 0: log-norm shadowing on Gamma_c. c = 0: the constant pseudosolution
/// P_eps = (1 - sqrt(eps), sqrt(eps)) drifts away from every true solution.
[[nodiscard]] ReplicationReport replicate_si(double c, double epsilon, double kappa_candidate, double T,
                                             const ReplicateOptions& opts = {});

/// Sup over [0, T] of |x_c(t) - y(t)| for the closed-form EXM solution with
/// gamma = c + 1/2 >= 0 and the exm pseudosolution with parameter delta.
[[nodiscard]] double exm_gap(double gamma, double delta, double T);

}  // namespace shadowlab
