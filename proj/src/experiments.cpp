#include "qreset/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <omp.h>

#include "qreset/errors.hpp"
#include "qreset/io.hpp"
#include "qreset/lqr.hpp"
#include "qreset/oracle.hpp"
#include "qreset/polaron.hpp"
#include "qreset/tdvp.hpp"

namespace qreset::experiments {

namespace {

void require_keys(const nlohmann::json& j, const char* where,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) { known = true; break; }
        if (!known)
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

int resolve_threads(const ExperimentConfig& config) {
    if (config.threads > 0) omp_set_num_threads(config.threads);
    return omp_get_max_threads();
}

void write_provenance(io::CsvWriter& csv, const ExperimentConfig& config,
                      const std::string& kind) {
    csv.comment("qreset " + kind);
    csv.comment("config: " + config.resolved().dump());
}

double log10_or(double value, double fallback) {
    return value > 0.0 ? std::log10(value) : fallback;
}

nlohmann::json json_or_null(double value) {
    if (std::isfinite(value)) return value;
    return nullptr;
}

std::string trimmed_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

} // namespace

nlohmann::json ExperimentConfig::resolved() const {
    nlohmann::json j;
    j["bath"] = bath;
    j["ground_state"] = {{"self_consistent", ground_state.self_consistent},
                         {"tol", ground_state.tol},
                         {"max_iter", ground_state.max_iter}};
    j["decouple"] = {{"lambdas", decouple.lambdas},
                     {"t_f", decouple.t_f},
                     {"dt", decouple.dt},
                     {"full_nonlinear", decouple.full_nonlinear},
                     {"track_omegas", decouple.track_omegas},
                     {"record_stride", decouple.record_stride}};
    j["lqr"] = {{"R", lqr.R},
                {"n_modes_coarse", lqr.n_modes_coarse},
                {"dt", lqr.dt},
                {"t_f", lqr.t_f},
                {"fine_replay", lqr.fine_replay},
                {"fine_factor", lqr.fine_factor}};
    j["validate"] = {{"n_modes", validate.n_modes},
                     {"fock_cutoff", validate.fock_cutoff},
                     {"target_sum_f2", validate.target_sum_f2},
                     {"lambda", validate.lambda},
                     {"t_f", validate.t_f},
                     {"halvings", validate.halvings},
                     {"dt", validate.dt}};
    j["threads"] = threads;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    require_keys(j, "config",
                 {"bath", "ground_state", "decouple", "lqr", "validate", "threads"});
    ExperimentConfig config;
    if (j.contains("bath")) config.bath = j.at("bath").get<bath::BathSpec>();
    if (j.contains("ground_state")) {
        const auto& g = j.at("ground_state");
        require_keys(g, "ground_state", {"self_consistent", "tol", "max_iter"});
        read_if(g, "self_consistent", config.ground_state.self_consistent);
        read_if(g, "tol", config.ground_state.tol);
        read_if(g, "max_iter", config.ground_state.max_iter);
    }
    if (j.contains("decouple")) {
        const auto& d = j.at("decouple");
        require_keys(d, "decouple",
                     {"lambdas", "t_f", "dt", "full_nonlinear", "track_omegas",
                      "record_stride"});
        read_if(d, "lambdas", config.decouple.lambdas);
        read_if(d, "t_f", config.decouple.t_f);
        read_if(d, "dt", config.decouple.dt);
        read_if(d, "full_nonlinear", config.decouple.full_nonlinear);
        read_if(d, "track_omegas", config.decouple.track_omegas);
        read_if(d, "record_stride", config.decouple.record_stride);
        for (const double lambda : config.decouple.lambdas)
            if (!(lambda > 0.0)) throw ConfigError("decouple: lambdas must be positive");
    }
    if (j.contains("lqr")) {
        const auto& l = j.at("lqr");
        require_keys(l, "lqr", {"R", "n_modes_coarse", "dt", "t_f", "fine_replay",
                                "fine_factor"});
        read_if(l, "R", config.lqr.R);
        read_if(l, "n_modes_coarse", config.lqr.n_modes_coarse);
        read_if(l, "dt", config.lqr.dt);
        read_if(l, "t_f", config.lqr.t_f);
        read_if(l, "fine_replay", config.lqr.fine_replay);
        read_if(l, "fine_factor", config.lqr.fine_factor);
        for (const double r : config.lqr.R)
            if (!(r > 0.0)) throw ConfigError("lqr: R values must be positive");
    }
    if (j.contains("validate")) {
        const auto& v = j.at("validate");
        require_keys(v, "validate", {"n_modes", "fock_cutoff", "target_sum_f2", "lambda",
                                     "t_f", "halvings", "dt"});
        read_if(v, "n_modes", config.validate.n_modes);
        read_if(v, "fock_cutoff", config.validate.fock_cutoff);
        read_if(v, "target_sum_f2", config.validate.target_sum_f2);
        read_if(v, "lambda", config.validate.lambda);
        read_if(v, "t_f", config.validate.t_f);
        read_if(v, "halvings", config.validate.halvings);
        read_if(v, "dt", config.validate.dt);
    }
    read_if(j, "threads", config.threads);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(io::read_json(path));
}

nlohmann::json run_ground_state(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
    ExperimentConfig resolved = config;
    resolved.threads = resolve_threads(config);
    const auto bath = resolved.bath.build();
    const double omega_q = resolved.bath.params.omega_q;

    polaron::GroundStateOptions opts;
    opts.self_consistent = resolved.ground_state.self_consistent;
    opts.tol = resolved.ground_state.tol;
    opts.max_iter = resolved.ground_state.max_iter;
    const polaron::State state = polaron::ground_state(bath, omega_q, opts);

    const double sum_f2 = polaron::sum_abs2(state);
    const double population = polaron::excited_population(state);
    const double energy = polaron::variational_energy(state, omega_q, bath);

    io::CsvWriter csv(out_dir / "spectrum.csv");
    write_provenance(csv, resolved, "ground-state");
    csv.columns({"omega_rad_per_ns", "re_f", "im_f", "g_f_rad_per_ns"});
    const auto profile = polaron::correlation_profile(state, bath);
    for (std::size_t k = 0; k < profile.size(); ++k)
        csv.row({profile[k].omega, state.displacements[k].real(),
                 state.displacements[k].imag(), profile[k].g_f.real()});

    nlohmann::json summary = {
        {"config", resolved.resolved()},
        {"P_plus", population},
        {"log10_P_plus", json_or_null(log10_or(population, -std::numeric_limits<double>::infinity()))},
        {"sum_f2", sum_f2},
        {"energy_rad_per_ns", energy},
        {"self_consistent", opts.self_consistent},
        {"n_modes", bath.size()},
        {"fixed_point_residual", polaron::fixed_point_residual(state, bath, omega_q)}};
    io::write_json(out_dir / "summary.json", summary);
    io::write_json(out_dir / "resolved_config.json", resolved.resolved());
    return summary;
}

nlohmann::json run_decouple(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir) {
    ExperimentConfig resolved = config;
    resolved.threads = resolve_threads(config);
    const auto bath = resolved.bath.build();
    const double omega_q = resolved.bath.params.omega_q;
    const auto& dconf = resolved.decouple;

    std::vector<tdvp::SwitchProfile> profiles;
    profiles.reserve(dconf.lambdas.size());
    for (const double lambda : dconf.lambdas)
        profiles.push_back(tdvp::SwitchProfile::rational(lambda, dconf.t_f));

    tdvp::EvolveOptions eopts;
    eopts.dt = dconf.dt;
    eopts.full_nonlinear = dconf.full_nonlinear;
    eopts.record_stride = dconf.record_stride;
    eopts.record_displacements = true;

    const polaron::State relaxed = polaron::ground_state(bath, omega_q);
    const double relaxed_population = polaron::excited_population(relaxed);

    // mode indices closest to the requested tracking frequencies
    std::vector<std::size_t> tracked;
    for (const double target : dconf.track_omegas) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < bath.size(); ++k)
            if (std::abs(bath.modes[k].omega - target) <
                std::abs(bath.modes[best].omega - target))
                best = k;
        tracked.push_back(best);
    }

    nlohmann::json summary;
    summary["config"] = resolved.resolved();
    summary["relaxed_P_plus"] = relaxed_population;
    summary["runs"] = nlohmann::json::array();

    io::CsvWriter table(out_dir / "summary.csv");
    write_provenance(table, resolved, "decouple");
    table.columns({"lambda", "final_P_plus", "log10_final_P_plus", "improvement_factor"});

    for (const auto& profile : profiles) {
        const tdvp::Trajectory traj = tdvp::evolve(relaxed, bath, omega_q, profile, eopts);
        const std::string tag = profile.label();

        io::CsvWriter pop(out_dir / ("population_" + tag + ".csv"));
        write_provenance(pop, resolved, "decouple");
        pop.columns({"t_ns", "u", "log10_P_plus"});
        for (std::size_t r = 0; r < traj.times.size(); ++r)
            pop.row({traj.times[r], traj.u_values[r], log10_or(traj.populations[r], -340.0)});

        for (const std::size_t k : tracked) {
            io::CsvWriter modecsv(out_dir / ("mode_" + tag + "_omega_" +
                                             trimmed_number(bath.modes[k].omega) + ".csv"));
            write_provenance(modecsv, resolved, "decouple");
            modecsv.columns({"t_ns", "re_f", "im_f"});
            for (std::size_t r = 0; r < traj.times.size(); ++r)
                modecsv.row({traj.times[r], traj.displacements[r][k].real(),
                             traj.displacements[r][k].imag()});
        }

        io::CsvWriter fin(out_dir / ("final_displacements_" + tag + ".csv"));
        write_provenance(fin, resolved, "decouple");
        fin.columns({"omega_rad_per_ns", "abs_f_tf"});
        for (std::size_t k = 0; k < bath.size(); ++k)
            fin.row({bath.modes[k].omega, std::abs(traj.final_state.displacements[k])});

        const double final_population = traj.final_population();
        table.row({profile.lambda, final_population, log10_or(final_population, -340.0),
                   relaxed_population / final_population});
        summary["runs"].push_back({{"lambda", profile.lambda},
                                   {"final_P_plus", final_population},
                                   {"log10_final_P_plus",
                                    json_or_null(log10_or(final_population,
                                                          -std::numeric_limits<double>::infinity()))},
                                   {"improvement_factor",
                                    relaxed_population / final_population}});
    }
    io::write_json(out_dir / "summary.json", summary);
    io::write_json(out_dir / "resolved_config.json", resolved.resolved());
    return summary;
}

nlohmann::json run_lqr(const ExperimentConfig& config,
                       const std::filesystem::path& out_dir) {
    ExperimentConfig resolved = config;
    resolved.threads = resolve_threads(config);
    const auto& lconf = resolved.lqr;
    const auto& params = resolved.bath.params;

    const auto coarse = bath::discretize(params, lconf.n_modes_coarse,
                                         resolved.bath.omega_max, resolved.bath.scheme);
    const lqr::AffineSystem system = lqr::build_system(coarse, params.omega_q, lconf.dt);
    const auto n_steps = static_cast<std::size_t>(std::llround(lconf.t_f / lconf.dt));
    if (n_steps == 0) throw ConfigError("lqr: dt must be smaller than t_f");
    const Eigen::VectorXd x0 = lqr::relaxed_state(coarse, params.omega_q);

    bath::Discretization fine;
    if (lconf.fine_replay)
        fine = bath::discretize(params, lconf.n_modes_coarse * lconf.fine_factor,
                                resolved.bath.omega_max, resolved.bath.scheme);

    nlohmann::json summary;
    summary["config"] = resolved.resolved();
    summary["runs"] = nlohmann::json::array();
    for (const double R : lconf.R) {
        const lqr::RiccatiResult riccati = lqr::riccati_backward(system, R, n_steps);
        const lqr::Solution sol = lqr::closed_loop(system, riccati, x0, R);
        const std::string tag = "R_" + trimmed_number(R);

        io::CsvWriter control(out_dir / ("control_" + tag + ".csv"));
        write_provenance(control, resolved, "lqr");
        control.columns({"t_ns", "u"});
        for (std::size_t t = 0; t < sol.control.size(); ++t)
            control.row({static_cast<double>(t) * lconf.dt, sol.control[t]});

        io::CsvWriter traj(out_dir / ("trajectory_" + tag + ".csv"));
        write_provenance(traj, resolved, "lqr");
        traj.columns({"t_ns", "u", "log10_P_plus"});
        for (std::size_t t = 0; t <= sol.control.size(); ++t) {
            const double sum_f2 = sol.states.row(static_cast<Eigen::Index>(t)).squaredNorm();
            const double population = 0.5 * (1.0 - std::exp(-2.0 * sum_f2));
            const double u = (t < sol.control.size()) ? sol.control[t] : 0.0;
            traj.row({static_cast<double>(t) * lconf.dt, u, log10_or(population, -340.0)});
        }

        std::size_t zero_crossings = 0;
        for (std::size_t t = 1; t < sol.control.size(); ++t)
            if ((sol.control[t - 1] > 0.0) != (sol.control[t] > 0.0)) ++zero_crossings;

        nlohmann::json entry = {{"R", R},
                                {"R_continuous", R * lconf.dt},
                                {"n_modes", lconf.n_modes_coarse},
                                {"dt", lconf.dt},
                                {"n_steps", n_steps},
                                {"terminal_cost", sol.terminal_cost},
                                {"control_cost", sol.control_cost},
                                {"total_cost", sol.cost()},
                                {"final_P_plus", sol.final_population},
                                {"control_zero_crossings", zero_crossings}};
        if (lconf.fine_replay)
            entry["fine_replay_P_plus"] =
                lqr::evaluate_on_fine_bath(sol.control, lconf.t_f, fine, params.omega_q);
        summary["runs"].push_back(std::move(entry));
    }
    io::write_json(out_dir / "summary.json", summary);
    io::write_json(out_dir / "resolved_config.json", resolved.resolved());
    return summary;
}

nlohmann::json run_validate(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir) {
    ExperimentConfig resolved = config;
    resolved.threads = resolve_threads(config);
    const auto& vconf = resolved.validate;
    const auto& params = resolved.bath.params;

    const auto base_modes =
        oracle::validation_modes(vconf.n_modes, vconf.target_sum_f2, params);
    const tdvp::SwitchProfile profile =
        tdvp::SwitchProfile::rational(vconf.lambda, vconf.t_f);

    nlohmann::json summary;
    summary["config"] = resolved.resolved();
    summary["levels"] = nlohmann::json::array();

    for (std::size_t level = 0; level <= vconf.halvings; ++level) {
        const double scale = std::pow(0.5, static_cast<double>(level));
        bath::Discretization mini;
        mini.scheme = bath::Scheme::GaussLegendre;
        mini.modes = base_modes;
        for (auto& mode : mini.modes) mode.g *= scale;
        mini.omega_max = mini.modes.back().omega;

        const polaron::State ground =
            polaron::ground_state(mini, params.omega_q, {.self_consistent = true});

        // step counts snapped to multiples of 10 so both engines record at the
        // same ten trajectory times (compared by record index below)
        const auto tdvp_steps = 10 * std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(vconf.t_f / vconf.dt / 10.0)));
        tdvp::EvolveOptions eopts;
        eopts.dt = vconf.t_f / static_cast<double>(tdvp_steps);
        eopts.record_stride = tdvp_steps / 10;
        const tdvp::Trajectory tdvp_traj =
            tdvp::evolve(ground, mini, params.omega_q, profile, eopts);

        const auto system =
            oracle::make_system(mini.modes, params.omega_q, vconf.fock_cutoff);
        auto prepared = oracle::prepare_polaron(system, ground.displacements);
        const double bound = system.norm_bound(1.0);
        auto oracle_steps =
            static_cast<std::size_t>(std::ceil(vconf.t_f * bound / 0.45));
        oracle_steps = 10 * ((oracle_steps + 9) / 10);
        oracle::ExactEvolveOptions oopts;
        oopts.dt = vconf.t_f / static_cast<double>(oracle_steps);
        oopts.record_stride = oracle_steps / 10;
        const oracle::ExactTrajectory exact =
            oracle::exact_evolve(system, profile, std::move(prepared.psi), oopts);

        const std::string tag = "level_" + std::to_string(level);
        io::CsvWriter tdvp_csv(out_dir / ("tdvp_" + tag + ".csv"));
        write_provenance(tdvp_csv, resolved, "validate");
        tdvp_csv.columns({"t_ns", "u", "log10_P_plus"});
        for (std::size_t r = 0; r < tdvp_traj.times.size(); ++r)
            tdvp_csv.row({tdvp_traj.times[r], tdvp_traj.u_values[r],
                          log10_or(tdvp_traj.populations[r], -340.0)});

        io::CsvWriter oracle_csv(out_dir / ("oracle_" + tag + ".csv"));
        write_provenance(oracle_csv, resolved, "validate");
        oracle_csv.columns({"t_ns", "u", "log10_P_plus"});
        for (std::size_t r = 0; r < exact.times.size(); ++r)
            oracle_csv.row({exact.times[r], switch_value(profile, exact.times[r]),
                            log10_or(exact.populations[r], -340.0)});

        const double p_tdvp = tdvp_traj.final_population();
        const double p_oracle = exact.populations.back();
        const double rel = std::abs(p_oracle - p_tdvp) / std::max(p_oracle, 1e-300);

        // displacement tracking along the trajectory; modes suppressed below a
        // few percent of their initial magnitude are phase-noise dominated and
        // carry no tracking information
        double max_disp_rel = 0.0;
        const std::size_t n_records =
            std::min(tdvp_traj.displacements.size(), exact.displacements.size());
        for (std::size_t r = 0; r < n_records; ++r) {
            for (std::size_t k = 0; k < mini.size(); ++k) {
                const double floor = 0.05 * std::abs(ground.displacements[k]);
                const double exact_abs = std::abs(exact.displacements[r][k]);
                const double tdvp_abs = std::abs(tdvp_traj.displacements[r][k]);
                if (exact_abs >= floor)
                    max_disp_rel =
                        std::max(max_disp_rel, std::abs(exact_abs - tdvp_abs) / exact_abs);
            }
        }

        summary["levels"].push_back({{"coupling_scale", scale},
                                     {"final_P_tdvp", p_tdvp},
                                     {"final_P_oracle", p_oracle},
                                     {"rel_discrepancy", rel},
                                     {"max_displacement_rel_discrepancy", max_disp_rel},
                                     {"norm_drift", exact.norm_drift},
                                     {"max_leakage", exact.max_leakage},
                                     {"valid", exact.valid},
                                     {"truncation_error", prepared.truncation_error}});
    }
    io::write_json(out_dir / "summary.json", summary);
    io::write_json(out_dir / "resolved_config.json", resolved.resolved());
    return summary;
}

} // namespace qreset::experiments
