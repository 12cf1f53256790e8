#ifndef RKM_CLI_HPP
#define RKM_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rkm/baselines.hpp"
#include "rkm/consistency.hpp"
#include "rkm/io.hpp"
#include "rkm/metrics.hpp"
#include "rkm/model_selection.hpp"
#include "rkm/parallel.hpp"
#include "rkm/solver.hpp"
#include "rkm/synthetic.hpp"

namespace rkm::cli {

enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2 };

enum class LogLevel { warn, info, debug };

/// Diagnostics on stderr, controlled by RKM_LOG=debug|info.
class Logger {
public:
    explicit Logger(std::ostream &sink) : sink_(sink) {
        if (const char *env = std::getenv("RKM_LOG")) {
            const std::string value(env);
            if (value == "debug") {
                level_ = LogLevel::debug;
            } else if (value == "info") {
                level_ = LogLevel::info;
            }
        }
    }

    void info(const std::string &message) const { emit(LogLevel::info, "info", message); }
    void debug(const std::string &message) const { emit(LogLevel::debug, "debug", message); }

private:
    void emit(LogLevel level, const char *tag, const std::string &message) const {
        if (static_cast<int>(level) <= static_cast<int>(level_)) {
            sink_ << "[rkm " << tag << "] " << message << '\n';
        }
    }

    std::ostream &sink_;
    LogLevel level_ = LogLevel::warn;
};

namespace detail {

inline std::vector<Index> parse_grid(const std::string &text) {
    std::vector<Index> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto value = rkm::detail::parse_double(rkm::detail::trim(item));
        if (!value || *value < 1 || *value != std::floor(*value)) {
            throw CLI::ValidationError("--n-grid", "expected comma-separated positive integers, got '" + text + "'");
        }
        out.push_back(static_cast<Index>(*value));
    }
    if (out.empty()) {
        throw CLI::ValidationError("--n-grid", "must list at least one sample size");
    }
    return out;
}

inline Json summary_json(const Quartiles &q) { return Json{{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}}; }

inline Json optional_json(const std::optional<double> &value) { return value ? Json(*value) : Json(nullptr); }

inline Json report_json(const ConvergenceReport &report) {
    Json summaries = Json::array();
    for (const auto &s : report.summaries) {
        summaries.push_back(Json{{"n", s.n},
                                 {"loss", summary_json(s.loss)},
                                 {"distance", summary_json(s.distance)},
                                 {"abs_loss_error", summary_json(s.abs_loss_error)},
                                 {"vr", s.vr ? summary_json(*s.vr) : Json(nullptr)}});
    }
    Json records = Json::array();
    for (const auto &r : report.records) {
        records.push_back(Json{{"n", r.n},
                               {"rep", r.rep},
                               {"seed", r.seed},
                               {"loss", r.loss},
                               {"distance", r.distance},
                               {"population_risk", r.population_risk},
                               {"vr", optional_json(r.vr)}});
    }
    return Json{{"k", report.k},
                {"q", report.q},
                {"n_grid", report.n_grid},
                {"reps", report.reps},
                {"reference_kind", report.reference_kind},
                {"reference_loss", report.reference_loss},
                {"reference_vr", optional_json(report.reference_vr)},
                {"grid_gap", report.grid_gap},
                {"summaries", std::move(summaries)},
                {"records", std::move(records)}};
}

inline std::string report_csv(const ConvergenceReport &report, const std::string &setting) {
    std::string out = "setting,n,rep,seed,loss,distance,population_risk,vr\n";
    for (const auto &r : report.records) {
        out += setting + ',' + std::to_string(r.n) + ',' + std::to_string(r.rep) + ',' + std::to_string(r.seed) +
               ',' + rkm::detail::format_double(r.loss) + ',' + rkm::detail::format_double(r.distance) + ',' +
               rkm::detail::format_double(r.population_risk) + ',' +
               (r.vr ? rkm::detail::format_double(*r.vr) : std::string("NA")) + '\n';
    }
    return out;
}

inline Delta2Form parse_form(const std::string &name) {
    return name == "literal" ? Delta2Form::literal : Delta2Form::central;
}

} // namespace detail

/// Parses and runs one command line. argv[0] is the program name.
inline int run_cli(const std::vector<std::string> &argv, std::ostream &out, std::ostream &err) {
    const Logger log(err);
    CLI::App app{"Reduced k-means clustering: fitting, baselines, dimension selection and experiments", "rkm"};
    app.require_subcommand(1);

    // Shared option storage.
    std::string input, output, truth, format = "json", preset, emit_coords, weights_path;
    std::string n_grid_text = "50,200,800,3200", form_name = "central";
    int clusters = 0, restarts = 0, reps = 0, max_dims = 0, max_iterations = 300, oracle_grid = default_oracle_grid;
    Index dims = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool normalize = false, zero_noise = false;
    double tolerance = 1e-9;
    Index gen_n = 400, p1 = 5, p2 = 5, p3 = 5, sample_n = 400;
    double center_range = 15.0, noise_corr = 0.25;
    double bound_n = 0, radius = 0, epsilon = 0;
    int bound_p = 0;

    auto add_common = [&](CLI::App *sub, bool reads_input) {
        if (reads_input) {
            sub->add_option("--input", input, "Data matrix CSV (rows are objects)")->required();
            sub->add_flag("--normalize", normalize, "Standardize columns before fitting");
        }
        sub->add_option("--output", output, "Write the result here instead of stdout");
        sub->add_option("--seed", seed, "Base random seed");
        sub->add_option("--threads", threads, "Cap on worker threads (0 = hardware)");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };

    auto *fit = app.add_subcommand("fit", "Fit reduced k-means");
    add_common(fit, true);
    fit->add_option("--clusters", clusters, "Number of clusters k")->required();
    fit->add_option("--dims", dims, "Subspace dimension q")->required();
    fit->add_option("--restarts", restarts, "Random restarts (default 30)");
    fit->add_option("--max-iter", max_iterations, "Iteration cap per restart");
    fit->add_option("--tol", tolerance, "Relative loss-decrease tolerance");
    fit->add_option("--truth", truth, "Ground-truth labels CSV for ARI");
    fit->add_option("--emit-coords", emit_coords, "Write PREFIX_scores.csv, PREFIX_centers.csv, PREFIX_loading.csv");

    auto *kmeans = app.add_subcommand("kmeans", "Lloyd's k-means baseline");
    add_common(kmeans, true);
    kmeans->add_option("--clusters", clusters, "Number of clusters k")->required();
    kmeans->add_option("--restarts", restarts, "Random restarts (default 30)");
    kmeans->add_option("--truth", truth, "Ground-truth labels CSV for ARI");

    auto *tandem = app.add_subcommand("tandem", "PCA followed by k-means on the scores");
    add_common(tandem, true);
    tandem->add_option("--clusters", clusters, "Number of clusters k")->required();
    tandem->add_option("--dims", dims, "Number of principal components q")->required();
    tandem->add_option("--restarts", restarts, "Random restarts (default 30)");
    tandem->add_option("--truth", truth, "Ground-truth labels CSV for ARI");

    auto *select = app.add_subcommand("select-dim", "Choose q by the variance-ratio curvature criterion");
    add_common(select, true);
    select->add_option("--clusters", clusters, "Number of clusters k")->required();
    select->add_option("--max-dims", max_dims, "Largest q profiled (default min(k-1, p))");
    select->add_option("--restarts", restarts, "Random restarts per q (default 50)");
    select->add_option("--truth", truth, "Ground-truth labels CSV; adds ARI per q");
    select->add_option("--delta2-form", form_name, "Second-difference form")
        ->check(CLI::IsMember({"central", "literal"}));

    auto *gen = app.add_subcommand("gen", "Generate a synthetic dataset with hidden low-dimensional clusters");
    gen->add_option("--output", output, "Data CSV path; labels go to <stem>.labels.csv")->required();
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--preset", preset, "Named setting")
        ->check(CLI::IsMember({"table1-q2p5", "table1-q2p10", "table1-q3p5", "table1-q3p10"}));
    gen->add_option("--clusters", clusters, "Number of clusters K (default 8)");
    gen->add_option("--dims", dims, "Latent dimension q (default 2)");
    gen->add_option("--p1", p1, "Informative variables");
    gen->add_option("--p2", p2, "Correlated noise variables");
    gen->add_option("--p3", p3, "Independent noise variables");
    gen->add_option("--n", gen_n, "Sample size");
    gen->add_option("--center-range", center_range, "Centers uniform on [-r, r]^q");
    gen->add_option("--noise-corr", noise_corr, "Correlation inside the correlated noise block");
    gen->add_flag("--zero-noise", zero_noise, "Place every object exactly on its center");
    gen->add_flag("--normalize", normalize, "Write standardized data instead of raw");

    auto *bench_consistency = app.add_subcommand("bench-consistency", "Monte Carlo consistency experiment");
    add_common(bench_consistency, false);
    bench_consistency->add_option("--input", input, "Population atoms CSV (default: the four points (+-1, +-0.1))");
    bench_consistency->add_option("--weights", weights_path, "Atom weights CSV (default: equal)");
    bench_consistency->add_option("--clusters", clusters, "Number of clusters k (default 2)");
    bench_consistency->add_option("--dims", dims, "Subspace dimension q (default 1)");
    bench_consistency->add_option("--n-grid", n_grid_text, "Comma-separated sample sizes");
    bench_consistency->add_option("--reps", reps, "Replications per sample size (default 50)");
    bench_consistency->add_option("--restarts", restarts, "Restarts per fit (default 20)");
    bench_consistency->add_option("--oracle-grid", oracle_grid, "Angles searched by the oracle");

    auto *bench_agreement = app.add_subcommand("bench-agreement", "Agreement of q-hat with the ARI-optimal q");
    add_common(bench_agreement, false);
    bench_agreement->add_option("--preset", preset, "Setting name, comma-separated list, or 'all'");
    bench_agreement->add_option("--reps", reps, "Datasets per setting (default 100)");
    bench_agreement->add_option("--n", sample_n, "Objects per dataset");
    bench_agreement->add_option("--clusters", clusters, "Clusters K (default 8)");
    bench_agreement->add_option("--restarts", restarts, "Restarts per fit (default 50)");
    bench_agreement->add_option("--delta2-form", form_name, "Second-difference form")
        ->check(CLI::IsMember({"central", "literal"}));

    auto *bound = app.add_subcommand("rate-bound", "Finite-sample deviation bound for the optimal risk");
    bound->add_option("--n", bound_n, "Sample size")->required();
    bound->add_option("--clusters", clusters, "Number of clusters k")->required();
    bound->add_option("--p", bound_p, "Number of variables p")->required();
    bound->add_option("--radius", radius, "Support bound B with ||x||^2 <= B")->required();
    bound->add_option("--epsilon", epsilon, "Deviation epsilon")->required();
    bound->add_option("--output", output, "Write the result here instead of stdout");

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    if (!args.empty()) {
        args.pop_back(); // program name
    }
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n" << app.help();
        return usage_error;
    }

    set_max_threads(threads);
    const auto started = std::chrono::steady_clock::now();
    ResultDocument doc;
    doc.command = app.get_subcommands().front()->get_name();
    std::optional<std::string> csv_text;

    auto emit = [&]() {
        const auto elapsed =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        doc.timing = Json{{"elapsed_ms", elapsed}};
        const std::string text = format == "csv" && csv_text ? *csv_text : serialize(doc);
        if (output.empty()) {
            out << text;
        } else {
            write_text(output, text);
        }
    };

    auto load_input = [&]() {
        log.info("loading " + input);
        DataMatrix x = load_csv(input);
        if (normalize) {
            x = normalize_columns(x);
        }
        log.debug("data is " + std::to_string(x.n()) + " x " + std::to_string(x.p()));
        return x;
    };

    auto add_ari = [&](const Assignment &labels) {
        if (truth.empty()) {
            return;
        }
        const Assignment reference = load_labels(truth);
        doc.metrics["ari"] = adjusted_rand_index(labels, reference);
    };

    try {
        if (fit->parsed()) {
            const DataMatrix x = load_input();
            SolverConfig config;
            config.k = clusters;
            config.q = dims;
            config.restarts = restarts > 0 ? restarts : 30;
            config.max_iterations = max_iterations;
            config.rel_tolerance = tolerance;
            config.seed = seed;
            doc.config = Json{{"input", input},         {"clusters", config.k},    {"dims", config.q},
                              {"restarts", config.restarts}, {"max_iterations", config.max_iterations},
                              {"rel_tolerance", config.rel_tolerance}, {"seed", seed}, {"normalize", normalize}};
            const RkmSolution sol = fit_rkm(x, config);
            log.info("best restart " + std::to_string(sol.restart_index) + " loss " +
                     rkm::detail::format_double(sol.loss));
            doc.solution = to_record(sol);
            doc.results = Json{{"restart_index", sol.restart_index}, {"converged", sol.converged},
                               {"vr_hat", vr_hat(x, sol)}};
            add_ari(sol.assignment);
            if (!emit_coords.empty()) {
                const Projection coords = project(x, sol);
                write_csv(emit_coords + "_scores.csv", coords.scores);
                write_csv(emit_coords + "_centers.csv", coords.centers);
                write_csv(emit_coords + "_loading.csv", sol.loading.values());
            }
            csv_text = format_labels_csv(sol.assignment);
        } else if (kmeans->parsed()) {
            const DataMatrix x = load_input();
            const int r = restarts > 0 ? restarts : 30;
            doc.config = Json{{"input", input}, {"clusters", clusters}, {"restarts", r}, {"seed", seed},
                              {"normalize", normalize}};
            const KmeansSolution sol = kmeans_fit(x, clusters, r, seed);
            doc.results = Json{{"centers", matrix_to_json(sol.centers, false)},
                               {"labels", sol.assignment.labels()},
                               {"loss", sol.loss},
                               {"iterations", sol.iterations}};
            add_ari(sol.assignment);
            csv_text = format_labels_csv(sol.assignment);
        } else if (tandem->parsed()) {
            const DataMatrix x = load_input();
            const int r = restarts > 0 ? restarts : 30;
            doc.config = Json{{"input", input}, {"clusters", clusters}, {"dims", dims}, {"restarts", r},
                              {"seed", seed},   {"normalize", normalize}};
            const TandemResult result = tandem_fit(x, clusters, dims, r, seed);
            doc.results = Json{{"loading", matrix_to_json(result.loading.values(), true)},
                               {"centers", matrix_to_json(result.clustering.centers, false)},
                               {"labels", result.clustering.assignment.labels()},
                               {"loss", result.clustering.loss}};
            add_ari(result.clustering.assignment);
            csv_text = format_labels_csv(result.clustering.assignment);
        } else if (select->parsed()) {
            const DataMatrix x = load_input();
            SolverConfig config;
            config.restarts = restarts > 0 ? restarts : default_selector_restarts;
            config.seed = seed;
            const int q_max = max_dims > 0 ? max_dims : max_profile_dimension(clusters, x.p());
            doc.config = Json{{"input", input},          {"clusters", clusters}, {"max_dims", q_max},
                              {"restarts", config.restarts}, {"seed", seed},     {"normalize", normalize},
                              {"delta2_form", form_name}};
            const VrProfile profile =
                select_dimension(x, clusters, q_max, config, SelectorOptions{detail::parse_form(form_name)});
            Json per_q = Json::array();
            std::optional<Assignment> reference;
            if (!truth.empty()) {
                reference = load_labels(truth);
            }
            std::string csv = reference ? "q,vr,delta2,loss,ari\n" : "q,vr,delta2,loss\n";
            for (int q = 1; q <= profile.q_max(); ++q) {
                const auto &fit_q = profile.fits[static_cast<std::size_t>(q - 1)];
                Json entry{{"q", q},
                           {"vr", profile.vr[static_cast<std::size_t>(q - 1)]},
                           {"delta2", profile.delta2[static_cast<std::size_t>(q - 1)]},
                           {"loss", fit_q.loss}};
                csv += std::to_string(q) + ',' + rkm::detail::format_double(entry["vr"].get<double>()) + ',' +
                       rkm::detail::format_double(entry["delta2"].get<double>()) + ',' +
                       rkm::detail::format_double(fit_q.loss);
                if (reference) {
                    const double ari = adjusted_rand_index(fit_q.assignment, *reference);
                    entry["ari"] = ari;
                    csv += ',' + rkm::detail::format_double(ari);
                }
                csv += '\n';
                per_q.push_back(std::move(entry));
            }
            doc.results = Json{{"q_hat", profile.q_hat}, {"profile", std::move(per_q)}};
            doc.solution = to_record(profile.fits[static_cast<std::size_t>(profile.q_hat - 1)]);
            csv_text = std::move(csv);
        } else if (gen->parsed()) {
            DatasetSpec spec;
            if (!preset.empty()) {
                spec = *table1_preset(preset);
            }
            if (clusters > 0) {
                spec.clusters = clusters;
            }
            if (dims > 0) {
                spec.q = dims;
            }
            if (!gen->get_option("--p1")->empty()) spec.p1 = p1;
            if (!gen->get_option("--p2")->empty()) spec.p2 = p2;
            if (!gen->get_option("--p3")->empty()) spec.p3 = p3;
            if (!gen->get_option("--n")->empty()) spec.n = gen_n;
            spec.center_range = center_range;
            spec.noise_corr = noise_corr;
            spec.zero_noise = zero_noise;
            spec.seed = seed;
            const GeneratedDataset data = generate_dataset(spec);
            write_csv(output, normalize ? data.z.values() : data.x.values());
            const std::filesystem::path data_path(output);
            const std::filesystem::path labels_path =
                data_path.parent_path() / (data_path.stem().string() + ".labels.csv");
            write_text(labels_path.string(), format_labels_csv(data.labels));
            log.info("wrote " + output + " and " + labels_path.string());
            return ok;
        } else if (bench_consistency->parsed()) {
            std::optional<PopulationSpec> pop;
            if (input.empty()) {
                pop = PopulationSpec::four_point();
            } else {
                Matrix atoms = load_csv(input).values();
                if (weights_path.empty()) {
                    pop = PopulationSpec::uniform(std::move(atoms));
                } else {
                    const Matrix w = parse_csv(rkm::detail::read_file(weights_path));
                    std::vector<double> weights(w.col(0).data(), w.col(0).data() + w.rows());
                    pop = PopulationSpec(std::move(atoms), std::move(weights));
                }
            }
            const int k = clusters > 0 ? clusters : 2;
            const Index q = dims > 0 ? dims : 1;
            const int r = reps > 0 ? reps : 50;
            const auto n_grid = detail::parse_grid(n_grid_text);
            SolverConfig config;
            config.restarts = restarts > 0 ? restarts : 20;
            config.seed = seed;
            doc.config = Json{{"input", input.empty() ? Json("four-point") : Json(input)},
                              {"clusters", k},
                              {"dims", q},
                              {"n_grid", n_grid},
                              {"reps", r},
                              {"restarts", config.restarts},
                              {"oracle_grid", oracle_grid},
                              {"seed", seed}};
            ConsistencyOptions options;
            options.oracle_grid = oracle_grid;
            const ConvergenceReport report = consistency_experiment(*pop, k, q, n_grid, r, config, options);
            doc.results = detail::report_json(report);
            csv_text = detail::report_csv(report, input.empty() ? "four-point" : input);
        } else if (bench_agreement->parsed()) {
            std::vector<AgreementSetting> settings;
            const auto all = table1_settings();
            const std::string names = preset.empty() ? "table1-q2p5" : preset;
            std::stringstream in(names);
            std::string name;
            while (std::getline(in, name, ',')) {
                if (name == "all") {
                    settings.insert(settings.end(), all.begin(), all.end());
                    continue;
                }
                auto it = std::find_if(all.begin(), all.end(), [&](const auto &s) { return s.name == name; });
                if (it == all.end()) {
                    err << "error: unknown preset '" << name << "'\n";
                    return usage_error;
                }
                settings.push_back(*it);
            }
            const int r = reps > 0 ? reps : 100;
            const int k = clusters > 0 ? clusters : 8;
            SolverConfig config;
            config.restarts = restarts > 0 ? restarts : default_selector_restarts;
            config.seed = seed;
            doc.config = Json{{"presets", names}, {"reps", r},      {"n", sample_n},
                              {"clusters", k},    {"restarts", config.restarts}, {"seed", seed},
                              {"delta2_form", form_name}};
            const AgreementTable table = agreement_experiment(settings, r, sample_n, k, config,
                                                              SelectorOptions{detail::parse_form(form_name)});
            Json rows = Json::array();
            for (const auto &row : table.rows) {
                rows.push_back(Json{{"setting", row.setting.name},
                                    {"q_true", row.setting.q_true},
                                    {"p1", row.setting.p1},
                                    {"reps", row.reps},
                                    {"agreements", row.agreements},
                                    {"rate", row.rate()}});
            }
            Json records = Json::array();
            std::string csv = "setting,rep,seed,q_hat,q_star,agree\n";
            for (const auto &rec : table.records) {
                const auto &setting_name = settings[rec.setting].name;
                records.push_back(Json{{"setting", setting_name},
                                       {"rep", rec.rep},
                                       {"seed", rec.seed},
                                       {"q_hat", rec.q_hat},
                                       {"q_star", rec.q_star},
                                       {"ari", rec.ari},
                                       {"vr", rec.vr},
                                       {"delta2", rec.delta2}});
                csv += setting_name + ',' + std::to_string(rec.rep) + ',' + std::to_string(rec.seed) + ',' +
                       std::to_string(rec.q_hat) + ',' + std::to_string(rec.q_star) + ',' +
                       (rec.q_hat == rec.q_star ? "1" : "0") + '\n';
            }
            doc.results = Json{{"rows", std::move(rows)}, {"records", std::move(records)}};
            csv_text = std::move(csv);
        } else if (bound->parsed()) {
            doc.config = Json{{"n", bound_n}, {"clusters", clusters}, {"p", bound_p}, {"radius", radius},
                              {"epsilon", epsilon}};
            const RateBound result = rate_bound(bound_n, clusters, bound_p, radius, epsilon);
            doc.results = Json{{"bound", result.bound}, {"raw", result.raw}, {"log_raw", result.log_raw}};
        }
        emit();
    } catch (const CLI::ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const ParseError &e) {
        err << "data error: " << e.what() << '\n';
        return data_error;
    } catch (const InvalidInput &e) {
        err << "data error: " << e.what() << '\n';
        return data_error;
    } catch (const DegenerateData &e) {
        err << "data error: " << e.what() << '\n';
        return data_error;
    }
    return ok;
}

inline int run_cli(int argc, char **argv) {
    return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace rkm::cli

#endif
