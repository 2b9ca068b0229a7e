#pragma once

// Deterministic Monte Carlo engine over the (K, SNR) grid: per-trial seeds
// are a pure function of (master_seed, K, snr, trial), trials are
// independent tasks, and aggregation is order-independent, so results do
// not depend on the worker count.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "sparsedet/config.hpp"
#include "sparsedet/detect.hpp"
#include "sparsedet/lasso.hpp"
#include "sparsedet/scene.hpp"
#include "sparsedet/version.hpp"

namespace sparsedet {

struct CellResult {
    std::size_t k = 0;
    double snr_db = 0.0;
    double h_used = 0.0;
    double gamma_used = 0.0;
    double empirical_failure_p = 0.0;  // fraction of trials with L_fa > 0
    double mean_detection = 0.0;       // K^-1 sum_i Pd_hat(i)
    std::vector<double> per_target_pd;
    std::size_t trial_count = 0;
    std::size_t failure_count = 0;
    std::size_t pre_truncation_failure_count = 0;  // diagnostic
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<std::vector<double>> h_table;  // [k index][snr index]
    std::vector<CellResult> cells;             // k-major, snr-minor
    std::string software_version;
    double total_runtime_seconds = 0.0;  // informational; not serialized
};

// One LASSO detection trial: synthesize, solve at h, truncate at
// ratio * h. The truncated support drives recovered_support / L_fa; the raw
// solver support drives per-target hits (see DetectionReport).
template <typename Scalar>
DetectionReport run_trial(const Dictionary<Scalar>& dict, const TargetScene<Scalar>& scene,
                          const NoiseSpec& noise, double h, const SolverConfig& cfg,
                          std::uint64_t trial_index = 0) {
    const MeasurementRecord<Scalar> record = synthesize_measurement(dict, scene, noise, trial_index);
    const LassoSolution<Scalar> sol = lasso_solve(dict.entries, record.y, h, cfg);
    if (!sol.converged) {
        throw domain_error("run_trial: solver did not converge (gap " + std::to_string(sol.duality_gap) +
                           ", kkt " + std::to_string(sol.kkt_residual) + ", " +
                           std::to_string(sol.iterations) + " iterations)");
    }

    DetectionReport report;
    report.method = DetectionMethod::lasso;
    report.parameter = h;

    for (std::size_t i = 0; i < sol.x.size(); ++i) {
        if (scalar_abs(sol.x[i]) > 0.0) report.pre_truncation_support.push_back(i);
    }
    const std::vector<Scalar> truncated = truncate_small(sol.x, h, cfg.truncation_ratio);
    for (std::size_t i = 0; i < truncated.size(); ++i) {
        if (scalar_abs(truncated[i]) > 0.0) report.recovered_support.push_back(i);
    }

    report.false_alarms = count_false_alarms(report.recovered_support, scene.support);
    report.pre_truncation_false_alarms = count_false_alarms(report.pre_truncation_support, scene.support);
    report.hits.resize(scene.support.size(), false);
    for (std::size_t i = 0; i < scene.support.size(); ++i) {
        const std::size_t target = scene.support[i];
        for (std::size_t idx : report.pre_truncation_support) {
            if (idx == target) {
                report.hits[i] = true;
                break;
            }
        }
    }
    return report;
}

namespace detail {

template <typename Scalar>
TargetScene<Scalar> scene_for_k(const ExperimentConfig& config, std::size_t k) {
    TargetScene<Scalar> scene;
    scene.grid_size_n = config.dict_n;
    for (std::size_t i = 0; i < k; ++i) {
        scene.support.push_back(config.positions[i] - 1);  // to 0-based
        scene.amplitudes.push_back(Scalar{config.amplitudes[i]});
    }
    return scene;
}

template <typename Scalar>
double gamma_for_k(const ExperimentConfig& config, const Dictionary<Scalar>& dict,
                   std::size_t k_index) {
    if (config.gamma_source == GammaSource::supplied) return config.supplied_gammas[k_index];
    const TargetScene<Scalar> scene = scene_for_k<Scalar>(config, config.k_values[k_index]);
    return incoherence_gamma(dict.entries, scene.support);
}

template <typename Scalar>
double max_offsupport_norm(const Dictionary<Scalar>& dict, const std::vector<std::size_t>& support) {
    std::vector<bool> in_s(dict.cols_n(), false);
    for (std::size_t idx : support) in_s[idx] = true;
    double best = 0.0;
    for (std::size_t j = 0; j < dict.cols_n(); ++j) {
        if (!in_s[j]) best = std::max(best, dict.column_norms[j]);
    }
    return best;
}

inline CellResult aggregate_cell(std::size_t k, double snr_db, double h, double gamma,
                                 const std::vector<DetectionReport>& reports) {
    CellResult cell;
    cell.k = k;
    cell.snr_db = snr_db;
    cell.h_used = h;
    cell.gamma_used = gamma;
    cell.trial_count = reports.size();
    cell.per_target_pd.assign(k, 0.0);
    for (const DetectionReport& r : reports) {
        if (r.false_alarms > 0) ++cell.failure_count;
        if (r.pre_truncation_false_alarms > 0) ++cell.pre_truncation_failure_count;
        for (std::size_t i = 0; i < k; ++i) {
            if (r.hits[i]) cell.per_target_pd[i] += 1.0;
        }
    }
    double mean = 0.0;
    for (double& pd : cell.per_target_pd) {
        pd /= static_cast<double>(cell.trial_count);
        mean += pd;
    }
    cell.mean_detection = k > 0 ? mean / static_cast<double>(k) : 0.0;
    cell.empirical_failure_p =
        static_cast<double>(cell.failure_count) / static_cast<double>(cell.trial_count);
    return cell;
}

}  // namespace detail

// All trials of one grid cell, serially.
template <typename Scalar>
CellResult run_cell(const ExperimentConfig& config, const Dictionary<Scalar>& dict, std::size_t k_index,
                    std::size_t snr_index) {
    const std::size_t k = config.k_values[k_index];
    const double snr_db = config.snr_db[snr_index];
    const double gamma = detail::gamma_for_k(config, dict, k_index);
    const TargetScene<Scalar> scene = detail::scene_for_k<Scalar>(config, k);

    Thm1Inputs inputs;
    inputs.sigma = snr_db_to_sigma(snr_db);
    inputs.gamma = gamma;
    inputs.n = config.dict_n;
    inputs.k = k;
    inputs.max_offsupport_norm = detail::max_offsupport_norm(dict, scene.support);
    inputs.failure_p = config.failure_p;
    const double h = min_h(inputs);

    SolverConfig solver;
    solver.truncation_ratio = config.truncation_ratio;

    std::vector<DetectionReport> reports;
    reports.reserve(config.trials_per_cell);
    for (std::uint64_t t = 0; t < config.trials_per_cell; ++t) {
        NoiseSpec noise;
        noise.family = config.noise_family;
        noise.sigma = inputs.sigma;
        noise.complex_valued = is_complex_v<Scalar>;
        noise.variance_convention = config.variance_convention;
        noise.seed = derive_trial_seed(config.master_seed, k, snr_db, t);
        try {
            reports.push_back(run_trial(dict, scene, noise, h, solver, t));
        } catch (const domain_error& e) {
            throw domain_error("cell K=" + std::to_string(k) + " SNR=" + std::to_string(snr_db) +
                               " trial " + std::to_string(t) + ": " + e.what());
        }
    }
    return detail::aggregate_cell(k, snr_db, h, gamma, reports);
}

// Full grid. Trials are scheduled over `threads` workers; the output is a
// pure function of the config regardless of the worker count.
template <typename Scalar>
ExperimentResult run_experiment_typed(const ExperimentConfig& config, std::size_t threads = 1) {
    validate_experiment_config(config);
    const auto wall_start = std::chrono::steady_clock::now();

    const Dictionary<Scalar> dict =
        build_chirp_dictionary<Scalar>(config.chirp, config.dict_m, config.dict_n);

    struct CellPlan {
        std::size_t k_index, snr_index, k;
        double snr_db, gamma, h, sigma;
        TargetScene<Scalar> scene;
    };
    std::vector<CellPlan> plan;
    ExperimentResult result;
    result.config = config;
    result.software_version = std::string(kSoftwareName) + " " + kSoftwareVersion;
    result.h_table.assign(config.k_values.size(), std::vector<double>(config.snr_db.size(), 0.0));

    for (std::size_t ki = 0; ki < config.k_values.size(); ++ki) {
        const double gamma = detail::gamma_for_k(config, dict, ki);
        const TargetScene<Scalar> scene = detail::scene_for_k<Scalar>(config, config.k_values[ki]);
        for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
            CellPlan cell;
            cell.k_index = ki;
            cell.snr_index = si;
            cell.k = config.k_values[ki];
            cell.snr_db = config.snr_db[si];
            cell.gamma = gamma;
            cell.sigma = snr_db_to_sigma(cell.snr_db);
            cell.scene = scene;

            Thm1Inputs inputs;
            inputs.sigma = cell.sigma;
            inputs.gamma = gamma;
            inputs.n = config.dict_n;
            inputs.k = cell.k;
            inputs.max_offsupport_norm = detail::max_offsupport_norm(dict, scene.support);
            inputs.failure_p = config.failure_p;
            cell.h = min_h(inputs);
            result.h_table[ki][si] = cell.h;
            plan.push_back(std::move(cell));
        }
    }

    SolverConfig solver;
    solver.truncation_ratio = config.truncation_ratio;

    const std::size_t trials = config.trials_per_cell;
    const std::size_t total_tasks = plan.size() * trials;
    std::vector<std::vector<DetectionReport>> reports(plan.size(),
                                                      std::vector<DetectionReport>(trials));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        while (true) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total_tasks) return;
            const std::size_t cell_index = task / trials;
            const std::uint64_t trial = task % trials;
            const CellPlan& cell = plan[cell_index];

            NoiseSpec noise;
            noise.family = config.noise_family;
            noise.sigma = cell.sigma;
            noise.complex_valued = is_complex_v<Scalar>;
            noise.variance_convention = config.variance_convention;
            noise.seed = derive_trial_seed(config.master_seed, cell.k, cell.snr_db, trial);
            try {
                reports[cell_index][trial] = run_trial(dict, cell.scene, noise, cell.h, solver, trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(total_tasks);
                return;
            }
        }
    };

    const std::size_t worker_count = std::max<std::size_t>(1, std::min(threads, total_tasks));
    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (std::size_t i = 0; i < worker_count; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const domain_error& e) {
            throw domain_error(std::string("run_experiment: invalid trial aborted the run: ") + e.what());
        }
    }

    for (std::size_t ci = 0; ci < plan.size(); ++ci) {
        result.cells.push_back(detail::aggregate_cell(plan[ci].k, plan[ci].snr_db, plan[ci].h,
                                                      plan[ci].gamma, reports[ci]));
    }

    result.total_runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads = 1) {
    if (config.chirp.complex_valued)
        return run_experiment_typed<std::complex<double>>(config, threads);
    return run_experiment_typed<double>(config, threads);
}

}  // namespace sparsedet
