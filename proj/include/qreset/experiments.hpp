// experiments.hpp — batch experiment runner behind the CLI subcommands

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "qreset/bath.hpp"

namespace qreset::experiments {

struct GroundStateConfig {
    bool self_consistent{false};
    double tol{1e-12};
    std::size_t max_iter{200};
};

struct DecoupleConfig {
    std::vector<double> lambdas{1.0, 1.5, 2.0, 2.5};
    double t_f{0.4};  // ns
    double dt{1e-3};  // ns
    bool full_nonlinear{false};
    std::vector<double> track_omegas{0.5 * bath::default_omega_q};
    std::size_t record_stride{1};
};

struct LqrConfig {
    std::vector<double> R{1e-7, 1e-9, 1e-11};  // per-step discrete weight
    std::size_t n_modes_coarse{150};
    double dt{1e-3};
    double t_f{0.4};
    bool fine_replay{true};
    std::size_t fine_factor{4};
};

struct ValidateConfig {
    std::size_t n_modes{3};
    std::size_t fock_cutoff{6};
    double target_sum_f2{1e-3};
    double lambda{1.0};  // the exact-method cross-check point; smoother switches
                         // suppress the residual below the ansatz error floor
    double t_f{0.4};
    std::size_t halvings{2};
    double dt{2e-4};  // TDVP comparison step; the oracle picks its own from ||H||
};

struct ExperimentConfig {
    bath::BathSpec bath{};
    GroundStateConfig ground_state{};
    DecoupleConfig decouple{};
    LqrConfig lqr{};
    ValidateConfig validate{};
    int threads{0};  // 0 = library default

    nlohmann::json resolved() const;  // full schema, reload-able as a config
};

// strict parse: unknown keys anywhere are errors
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Each runner writes resolved_config.json, summary.json and per-curve CSVs
// into out_dir and returns the summary. Identical configs (including thread
// count) reproduce outputs byte for byte.
nlohmann::json run_ground_state(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir);
nlohmann::json run_decouple(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);
nlohmann::json run_lqr(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json run_validate(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);

} // namespace qreset::experiments
