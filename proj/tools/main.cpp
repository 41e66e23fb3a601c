#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oas/baseline.hpp"
#include "oas/errors.hpp"
#include "oas/harness.hpp"
#include "oas/num_format.hpp"
#include "oas/posterior.hpp"
#include "oas/scheduler.hpp"
#include "oas/source_model.hpp"
#include "oas/stopping.hpp"
#include "oas/sweep_io.hpp"

namespace {

using namespace oas;

void print_kv(const std::string& key, const std::string& value) {
    std::cout << "# " << key << " = " << value << '\n';
}

const char* kind_name(SourceKind kind) {
    return kind == SourceKind::SparseGaussian ? "sparse-gaussian" : "binary";
}

SourceKind parse_kind(const std::string& name) {
    if (name == "sparse-gaussian") return SourceKind::SparseGaussian;
    if (name == "binary") return SourceKind::Binary;
    throw ConfigError("unknown source '" + name + "' (expected sparse-gaussian or binary)");
}

SourceModel make_model(SourceKind kind, double p) {
    return kind == SourceKind::SparseGaussian ? SourceModel::sparse_gaussian(p)
                                              : SourceModel::binary(p);
}

template <typename T, typename Format>
std::string join(const std::vector<T>& values, Format format) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) joined += ',';
        joined += format(values[i]);
    }
    return joined;
}

struct ReconstructArgs {
    std::string source = "sparse-gaussian";
    double p = 0.0;
    double sigma2 = 0.0;
    double sum = 0.0;
    std::int64_t count = 0;
    bool oracle = false;
};

void run_reconstruct(const ReconstructArgs& args) {
    const SourceModel model = make_model(parse_kind(args.source), args.p);
    print_kv("source", args.source);
    print_kv("p", format_number(args.p));
    print_kv("sigma2", format_number(args.sigma2));
    print_kv("sum", format_number(args.sum));
    print_kv("count", std::to_string(args.count));

    const ObservationSummary obs{args.sum, args.count};
    const double r = reconstruct(model, obs, args.sigma2);
    const double mse = posterior_mse(model, obs, args.sigma2);
    std::cout << "r = " << format_number(r) << '\n';
    std::cout << "mse = " << format_number(mse) << '\n';

    if (args.oracle) {
        // The oracle consumes individual observations; splitting the sum
        // into equal parts keeps the sufficient statistics (sum, count).
        const std::vector<double> observations(
            static_cast<std::size_t>(args.count),
            args.sum / static_cast<double>(args.count));
        const PosteriorEstimate est = posterior_oracle(model, observations, args.sigma2);
        std::cout << "oracle_r = " << format_number(est.r) << '\n';
        std::cout << "oracle_mse = " << format_number(est.mse) << '\n';
        const double discrepancy =
            std::max(std::abs(r - est.r), std::abs(mse - est.mse));
        std::cout << "discrepancy = " << format_number(discrepancy) << '\n';
    }
}

struct ThresholdsArgs {
    std::string source = "sparse-gaussian";
    double p = 0.0;
    double sigma2 = 0.0;
    double target = 0.0;
    int k_max = 64;
};

void run_thresholds(const ThresholdsArgs& args) {
    const SourceModel model = make_model(parse_kind(args.source), args.p);
    print_kv("source", args.source);
    print_kv("p", format_number(args.p));
    print_kv("sigma2", format_number(args.sigma2));
    print_kv("target_mse", format_number(args.target));
    print_kv("k_max", std::to_string(args.k_max));

    const StoppingThresholds table =
        StoppingThresholds::compute(model, args.sigma2, args.target, args.k_max);
    write_thresholds_csv(std::cout, table);
}

struct TrialArgs {
    std::string source = "sparse-gaussian";
    double p = 0.9;
    double esn0_db = 10.0;
    int n = 100;
    double c = 3.0;
    int m = 16;
    std::string policy = "worst_component";
    std::uint64_t seed = 1;
    int trial_index = 0;
    int sensors = 4;
    double target = 0.0;
    bool target_given = false;
    bool trace = false;
};

void run_trial_command(const TrialArgs& args) {
    ExperimentConfig config;
    config.source_kind = parse_kind(args.source);
    config.p = args.p;
    config.esn0_db = args.esn0_db;
    config.n_components = args.n;
    config.master_seed = args.seed;
    config.k_sensors = args.sensors;

    const Policy policy = parse_policy(args.policy);
    const bool asymptotic =
        policy == Policy::Asymptotic || policy == Policy::ParallelAsymptotic;
    if (args.target_given && !asymptotic) {
        throw ConfigError("--target only applies to the asymptotic policies");
    }
    if (args.trace && policy == Policy::Orthogonal) {
        throw ConfigError("the orthogonal baseline has no schedule trace");
    }

    print_kv("source", args.source);
    print_kv("p", format_number(args.p));
    print_kv("esn0_db", format_number(args.esn0_db));
    print_kv("n_components", std::to_string(args.n));
    print_kv("compression_ratio", format_number(args.c));
    print_kv("oversampling", std::to_string(policy == Policy::Orthogonal ? 1 : args.m));
    print_kv("policy", policy_name(policy));
    if (policy == Policy::ParallelAsymptotic) print_kv("k_sensors", std::to_string(args.sensors));
    print_kv("master_seed", std::to_string(args.seed));
    print_kv("trial_index", std::to_string(args.trial_index));

    CellPlan plan = [&] {
        if (!args.target_given) return plan_cell(config, policy, args.c, args.m);
        // A given target skips calibration; everything else matches plan_cell.
        const SourceModel model = config.source();
        CellPlan custom{model};
        custom.policy = policy;
        custom.compression_ratio = args.c;
        custom.oversampling = args.m;
        custom.n_components = args.n;
        custom.esn0_db = args.esn0_db;
        custom.cell_seed = cell_seed(args.seed, policy, args.c, args.m);
        if (policy == Policy::ParallelAsymptotic) custom.n_sensors = args.sensors;
        custom.budget = BudgetModel::from_snr(model, args.n, args.c, args.m, args.esn0_db);
        custom.target_mse = args.target;
        custom.thresholds = std::make_shared<StoppingThresholds>(StoppingThresholds::compute(
            model, custom.budget.sigma2_per_slot, args.target,
            StoppingThresholds::default_k_max(args.m, args.c)));
        return custom;
    }();

    if (policy == Policy::Orthogonal) {
        print_kv("sigma2_per_component",
                 format_number(orthogonal_sigma2(plan.model, args.c, args.esn0_db)));
    } else {
        print_kv("sigma2_per_slot", format_number(plan.budget.sigma2_per_slot));
        print_kv("total_slots", std::to_string(plan.budget.total_slots));
    }
    if (asymptotic) print_kv("target_mse", format_number(plan.target_mse));

    const TrialResult result = run_trial(plan, args.trial_index, args.trace);
    const double total = std::accumulate(result.squared_errors.begin(),
                                         result.squared_errors.end(), 0.0);
    std::cout << "slots_used = " << result.slots_used << '\n';
    std::cout << "trial_mse = "
              << format_number(total / static_cast<double>(result.squared_errors.size()))
              << '\n';
    if (args.trace) write_trace(std::cout, result.trace);
}

struct SweepArgs {
    std::string config_path;
    std::string out_dir;
    std::string overlay_path;
    int workers = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    bool trials_given = false;
    bool seed_given = false;
};

void run_sweep_command(const SweepArgs& args) {
    ExperimentConfig config = load_config_file(args.config_path);
    if (args.trials_given) config.trials = args.trials;
    if (args.seed_given) config.master_seed = args.seed;

    print_kv("source_kind", kind_name(config.source_kind));
    print_kv("p", format_number(config.p));
    print_kv("esn0_db", format_number(config.esn0_db));
    print_kv("n_components", std::to_string(config.n_components));
    print_kv("compression_ratios",
             join(config.compression_ratios, [](double c) { return format_number(c); }));
    print_kv("oversampling_factors",
             join(config.oversampling_factors, [](int m) { return std::to_string(m); }));
    print_kv("policies", join(config.policies, [](Policy p) { return std::string(policy_name(p)); }));
    print_kv("trials", std::to_string(config.trials));
    print_kv("master_seed", std::to_string(config.master_seed));
    print_kv("k_sensors", std::to_string(config.k_sensors));
    const SourceModel model = config.source();
    for (const int m : config.oversampling_factors) {
        const double snr = std::pow(10.0, config.esn0_db / 10.0);
        print_kv("sigma2_per_slot(M=" + std::to_string(m) + ")",
                 format_number(static_cast<double>(m) * model.average_power() / snr));
    }

    std::vector<OverlayPoint> overlay;
    if (!args.overlay_path.empty()) overlay = load_overlay_csv(args.overlay_path);

    const std::vector<CellResult> cells = run_sweep(config, args.workers);
    const std::string csv_path = args.out_dir + "/results.csv";
    const std::string gp_path = args.out_dir + "/results.gp";
    write_text_file(csv_path, results_csv(cells));
    write_text_file(gp_path, gnuplot_script("results.csv", cells, overlay));
    std::cout << "wrote " << csv_path << '\n';
    std::cout << "wrote " << gp_path << '\n';
}

std::string default_out_dir() {
    const char* env = std::getenv("OAS_OUT_DIR");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian oversampled adaptive sensing toolkit"};
    app.require_subcommand(1);

    auto rec = std::make_shared<ReconstructArgs>();
    CLI::App* rec_cmd = app.add_subcommand(
        "reconstruct", "Evaluate the conditional-mean estimator and its posterior mse");
    rec_cmd->add_option("--source", rec->source, "Source model: sparse-gaussian or binary")
        ->capture_default_str();
    rec_cmd->add_option("--p", rec->p, "Source probability parameter")->required();
    rec_cmd->add_option("--sigma2", rec->sigma2, "Per-observation noise variance")->required();
    rec_cmd->add_option("--sum", rec->sum, "Observation sum")->required();
    rec_cmd->add_option("--count", rec->count, "Observation count")->required();
    rec_cmd->add_flag("--oracle", rec->oracle, "Cross-check against the quadrature oracle");
    rec_cmd->callback([rec] { run_reconstruct(*rec); });

    auto thr = std::make_shared<ThresholdsArgs>();
    CLI::App* thr_cmd = app.add_subcommand(
        "thresholds", "Print the observation-domain stopping threshold table as CSV");
    thr_cmd->add_option("--source", thr->source, "Source model: sparse-gaussian or binary")
        ->capture_default_str();
    thr_cmd->add_option("--p", thr->p, "Source probability parameter")->required();
    thr_cmd->add_option("--sigma2", thr->sigma2, "Per-observation noise variance")->required();
    thr_cmd->add_option("--target", thr->target, "Target posterior mse")->required();
    thr_cmd->add_option("--k-max", thr->k_max, "Table depth in observation counts")
        ->capture_default_str();
    thr_cmd->callback([thr] { run_thresholds(*thr); });

    auto trial = std::make_shared<TrialArgs>();
    CLI::App* trial_cmd =
        app.add_subcommand("trial", "Run one measurement schedule and report its outcome");
    trial_cmd->add_option("--source", trial->source, "Source model: sparse-gaussian or binary")
        ->capture_default_str();
    trial_cmd->add_option("--p", trial->p, "Source probability parameter")
        ->capture_default_str();
    trial_cmd->add_option("--esn0-db", trial->esn0_db, "Es/N0 operating point in dB")
        ->capture_default_str();
    trial_cmd->add_option("--n", trial->n, "Number of data components")->capture_default_str();
    trial_cmd->add_option("--c", trial->c, "Compression ratio")->capture_default_str();
    trial_cmd->add_option("--m", trial->m, "Oversampling factor")->capture_default_str();
    trial_cmd
        ->add_option("--policy", trial->policy,
                     "worst_component, asymptotic, parallel_asymptotic, or orthogonal")
        ->capture_default_str();
    trial_cmd->add_option("--seed", trial->seed, "Master seed")->capture_default_str();
    trial_cmd->add_option("--trial-index", trial->trial_index, "Trial id within the cell")
        ->capture_default_str();
    trial_cmd->add_option("--sensors", trial->sensors, "Sensor count (parallel policy)")
        ->capture_default_str();
    CLI::Option* target_opt = trial_cmd->add_option(
        "--target", trial->target, "Target mse for the asymptotic policies (skips calibration)");
    trial_cmd->add_flag("--trace", trial->trace, "Print the slot-by-slot schedule");
    trial_cmd->callback([trial, target_opt] {
        trial->target_given = target_opt->count() > 0;
        run_trial_command(*trial);
    });

    auto sweep = std::make_shared<SweepArgs>();
    sweep->out_dir = default_out_dir();
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Run the full experiment grid and write results.csv plus a gnuplot script");
    sweep_cmd->add_option("--config", sweep->config_path, "Experiment config file")->required();
    sweep_cmd->add_option("--out", sweep->out_dir, "Output directory")->capture_default_str();
    sweep_cmd->add_option("--workers", sweep->workers, "Worker threads (0 = hardware)")
        ->capture_default_str();
    CLI::Option* trials_opt =
        sweep_cmd->add_option("--trials", sweep->trials, "Override the config's trial count");
    CLI::Option* seed_opt =
        sweep_cmd->add_option("--seed", sweep->seed, "Override the config's master seed");
    sweep_cmd->add_option("--overlay", sweep->overlay_path,
                          "Reference curve CSV (compression_ratio,mse_db,label)");
    sweep_cmd->callback([sweep, trials_opt, seed_opt] {
        sweep->trials_given = trials_opt->count() > 0;
        sweep->seed_given = seed_opt->count() > 0;
        run_sweep_command(*sweep);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
