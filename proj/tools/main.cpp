// Command-line front-end: fit, simulate, oracle, and cv subcommands.

#include "top/estimator.hpp"
#include "top/eval.hpp"
#include "top/io.hpp"
#include "top/rng.hpp"
#include "top/synth.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace top;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitModel = 3;  // no anchors / assumption violated / all CV points failed
constexpr int kExitLp = 4;

std::string g_invocation;

int default_jobs() {
    if (const char* env = std::getenv("TOP_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

CountFormat parse_format(const std::string& name) {
    if (name == "uci") return CountFormat::uci_bow;
    if (name == "tsv") return CountFormat::tsv_dense;
    throw Error("expected format 'uci' or 'tsv', got '" + name + "'");
}

CountData load_corpus(const std::string& path, const std::string& format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file " + path, 0);
    return load_counts(in, parse_format(format));
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "# " << g_invocation << "\n";
    return out;
}

struct FitFlags {
    std::string input;
    std::string format = "uci";
    std::string out_dir = ".";
    std::string moment_cache;
    double c0 = 0.01;
    double c1 = 1.1;
    int reps = 1;
    std::uint64_t seed = 0;
};

void write_fit_outputs(const fs::path& dir, const CountData& data, const FitResult& result,
                       const FitFlags& flags) {
    fs::create_directories(dir);
    {
        std::ofstream out = open_output(dir / "a_hat.tsv");
        for (int k = 0; k < result.a_hat.cols(); ++k) out << (k ? "\t" : "") << "topic_" << (k + 1);
        out << "\n";
        write_matrix_tsv(result.a_hat, out);
    }
    {
        std::ofstream out = open_output(dir / "partition.txt");
        write_partition(result.partition, out);
    }
    {
        // Row -> original 1-based word index (identity unless words were pruned).
        std::ofstream out = open_output(dir / "words.txt");
        for (int j = 0; j < data.p; ++j) out << data.kept_words[j] + 1 << "\n";
    }
    {
        std::ofstream out = open_output(dir / "fit_meta.txt");
        out << "k_hat: " << result.partition.k_hat() << "\n";
        out << "p: " << data.p << "\n";
        out << "n: " << data.n << "\n";
        out << "c0: " << format_double(flags.c0) << "\n";
        out << "c1: " << format_double(flags.c1) << "\n";
        out << "reps: " << flags.reps << "\n";
        out << "seed: " << flags.seed << "\n";
        for (std::size_t t = 0; t < result.lambdas.size(); ++t) {
            out << "lambda_" << (t + 1) << ": " << format_double(result.lambdas[t]) << "\n";
            out << "rep_set_" << (t + 1) << ":";
            for (int i : result.rep_sets[t].indices) out << ' ' << i + 1;
            out << "\n";
            int iterations = 0;
            for (const auto& d : result.lp_diagnostics[t]) iterations += d.iterations;
            out << "lp_iterations_" << (t + 1) << ": " << iterations << "\n";
        }
        out << "degenerate_columns:";
        for (int c : result.degenerate_columns) out << ' ' << c + 1;
        out << "\n";
    }
}

int cmd_fit(const FitFlags& flags) {
    const CountData data = load_corpus(flags.input, flags.format);
    TuningProfile tuning{flags.c0, flags.c1, flags.reps, flags.seed};
    validate_tuning(tuning);

    FitResult result;
    if (!flags.moment_cache.empty()) {
        MomentSet moments;
        if (auto cached = load_moment_cache(flags.moment_cache, data)) {
            moments = std::move(*cached);
        } else {
            moments = compute_moments(data);
            save_moment_cache(flags.moment_cache, data, moments);
        }
        result = fit_from_moments(moments, tuning.c1 * moments.delta_anchor, std::nullopt, tuning);
    } else {
        result = fit(data, tuning);
    }
    write_fit_outputs(flags.out_dir, data, result, flags);
    std::cout << "k_hat = " << result.partition.k_hat() << ", anchors = "
              << result.partition.anchor_set().size() << ", outputs in " << flags.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct Setting {
    int p = 200;
    int k = 10;
    int n = 500;
    std::int64_t doc_length = 500;
    int anchors = 2;
    double xi = 0.0;  // 0 -> 1/p

    double xi_value() const { return xi > 0.0 ? xi : 1.0 / p; }
};

struct SimFlags {
    Setting base;
    std::vector<std::string> vary;
    int replicates = 10;
    std::uint64_t seed = 0;
    double c0 = 0.01;
    double c1 = 1.1;
    int reps = 1;
    int jobs = 0;
    std::string out_dir = ".";
};

struct SimRow {
    int setting_id = 0;
    Setting setting;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    int k_hat = 0;
    double sensitivity = 0.0, specificity = 0.0, l1 = 0.0, l1_per_topic = 0.0, l1_inf = 0.0;
};

std::vector<Setting> expand_grid(const Setting& base, const std::vector<std::string>& vary) {
    std::vector<Setting> grid = {base};
    for (const std::string& spec : vary) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw Error("--vary expects name=v1,v2,...: " + spec);
        const std::string name = spec.substr(0, eq);
        std::vector<double> values;
        std::stringstream list(spec.substr(eq + 1));
        std::string token;
        while (std::getline(list, token, ',')) {
            try {
                values.push_back(std::stod(token));
            } catch (const std::exception&) {
                throw Error("bad value '" + token + "' in --vary " + spec);
            }
        }
        if (values.empty()) throw Error("empty value list in --vary " + spec);
        std::vector<Setting> next;
        for (const Setting& s : grid) {
            for (double v : values) {
                Setting t = s;
                if (name == "p") t.p = static_cast<int>(v);
                else if (name == "k") t.k = static_cast<int>(v);
                else if (name == "n") t.n = static_cast<int>(v);
                else if (name == "doc-length") t.doc_length = static_cast<std::int64_t>(v);
                else if (name == "anchors-per-topic") t.anchors = static_cast<int>(v);
                else if (name == "xi") t.xi = v;
                else throw Error("unknown --vary parameter '" + name + "'");
                next.push_back(t);
            }
        }
        grid = std::move(next);
    }
    return grid;
}

SimRow run_replicate(int setting_id, const Setting& s, int replicate, const SimFlags& flags) {
    SimRow row;
    row.setting_id = setting_id;
    row.setting = s;
    row.replicate = replicate;
    row.seed = mix_seed(flags.seed, static_cast<std::uint64_t>(setting_id),
                        static_cast<std::uint64_t>(replicate));
    try {
        const GeneratedA gen = generate_a(s.p, s.k, s.anchors, s.xi_value(), mix_seed(row.seed, 1, 0));
        const Matrix w = generate_w(s.n, s.k, mix_seed(row.seed, 2, 0));
        const TopicModel model = validate_topic_model(gen.a, w);
        const CountData data = prune_zero_rows(
            sample_corpus(model, std::vector<std::int64_t>(s.n, s.doc_length), mix_seed(row.seed, 3, 0)));

        TuningProfile tuning{flags.c0, flags.c1, flags.reps, mix_seed(row.seed, 4, 0)};
        const FitResult fitted = fit(data, tuning);
        row.k_hat = fitted.partition.k_hat();

        Matrix a_full = Matrix::Zero(s.p, fitted.partition.k_hat());
        for (int j = 0; j < data.p; ++j) a_full.row(data.kept_words[j]) = fitted.a_hat.row(j);
        AnchorPartition remapped;
        for (const auto& group : fitted.partition.groups) {
            std::vector<int> g;
            for (int j : group) g.push_back(data.kept_words[j]);
            remapped.groups.push_back(std::move(g));
        }
        std::tie(row.sensitivity, row.specificity) = sensitivity_specificity(remapped, model);
        const AlignedLoss loss = aligned_losses(a_full, model.a);
        row.l1 = loss.l1;
        row.l1_per_topic = loss.l1 / s.k;
        row.l1_inf = loss.l1_inf;
    } catch (const NoAnchorsFound&) {
        row.status = "no_anchors";
    } catch (const LpFailed&) {
        row.status = "lp_failed";
    }
    return row;
}

int cmd_simulate(const SimFlags& flags) {
    if (flags.replicates < 1) throw Error("--replicates must be at least 1");
    const std::vector<Setting> grid = expand_grid(flags.base, flags.vary);
    for (const Setting& s : grid) {
        if (s.p < 2 || s.k < 1 || s.n < 1 || s.doc_length < 2 || s.anchors < 1)
            throw Error("invalid sweep setting (p, k, n, doc-length, anchors-per-topic)");
    }

    std::vector<SimRow> rows(grid.size() * flags.replicates);
    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, flags.jobs > 0 ? flags.jobs : default_jobs());
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= rows.size()) return;
            const int setting_id = static_cast<int>(task / flags.replicates);
            const int replicate = static_cast<int>(task % flags.replicates);
            rows[task] = run_replicate(setting_id, grid[setting_id], replicate, flags);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    fs::create_directories(flags.out_dir);
    const fs::path dir(flags.out_dir);
    {
        std::ofstream out = open_output(dir / "detail.tsv");
        out << "setting\tp\tn\tdoc_length\tk\tanchors_per_topic\txi\treplicate\tseed\tstatus\tk_hat"
            << "\tsensitivity\tspecificity\tl1\tl1_per_topic\tl1_inf\n";
        for (const SimRow& r : rows) {
            out << r.setting_id << '\t' << r.setting.p << '\t' << r.setting.n << '\t' << r.setting.doc_length
                << '\t' << r.setting.k << '\t' << r.setting.anchors << '\t'
                << format_double(r.setting.xi_value()) << '\t' << r.replicate << '\t' << r.seed << '\t'
                << r.status << '\t' << r.k_hat << '\t' << format_double(r.sensitivity) << '\t'
                << format_double(r.specificity) << '\t' << format_double(r.l1) << '\t'
                << format_double(r.l1_per_topic) << '\t' << format_double(r.l1_inf) << "\n";
        }
    }
    {
        std::ofstream out = open_output(dir / "aggregate.tsv");
        out << "setting\tp\tn\tdoc_length\tk\tanchors_per_topic\txi\treplicates\tok\tk_correct"
            << "\tmean_sensitivity\tmean_specificity\tmean_l1_per_topic\tsd_l1_per_topic"
            << "\tmean_l1_inf\tsd_l1_inf\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            int ok = 0, k_correct = 0;
            double sens = 0, spec = 0, l1k = 0, l1k2 = 0, linf = 0, linf2 = 0;
            for (int r = 0; r < flags.replicates; ++r) {
                const SimRow& row = rows[g * flags.replicates + r];
                if (row.status != "ok") continue;
                ++ok;
                k_correct += row.k_hat == grid[g].k;
                sens += row.sensitivity;
                spec += row.specificity;
                l1k += row.l1_per_topic;
                l1k2 += row.l1_per_topic * row.l1_per_topic;
                linf += row.l1_inf;
                linf2 += row.l1_inf * row.l1_inf;
            }
            const double denom = std::max(ok, 1);
            const auto sd = [&](double sum, double sum2) {
                if (ok < 2) return 0.0;
                const double var = (sum2 - sum * sum / denom) / (denom - 1.0);
                return std::sqrt(std::max(var, 0.0));
            };
            out << g << '\t' << grid[g].p << '\t' << grid[g].n << '\t' << grid[g].doc_length << '\t'
                << grid[g].k << '\t' << grid[g].anchors << '\t' << format_double(grid[g].xi_value()) << '\t'
                << flags.replicates << '\t' << ok << '\t' << k_correct << '\t'
                << format_double(sens / denom) << '\t' << format_double(spec / denom) << '\t'
                << format_double(l1k / denom) << '\t' << format_double(sd(l1k, l1k2)) << '\t'
                << format_double(linf / denom) << '\t' << format_double(sd(linf, linf2)) << "\n";
        }
    }
    {
        std::ofstream out = open_output(dir / "manifest.txt");
        out << "settings: " << grid.size() << "\n";
        out << "replicates: " << flags.replicates << "\n";
        out << "seed: " << flags.seed << "\n";
        out << "c0: " << format_double(flags.c0) << "\n";
        out << "c1: " << format_double(flags.c1) << "\n";
        out << "reps: " << flags.reps << "\n";
    }
    std::cout << grid.size() << " setting(s) x " << flags.replicates << " replicate(s); outputs in "
              << flags.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleFlags {
    bool demo = false;
    int p = 30;
    int k = 4;
    int n = 40;
    std::uint64_t seed = 0;
    std::string w_file;
};

int cmd_oracle(const OracleFlags& flags) {
    TopicModel model;
    if (flags.demo) {
        model = toy_model();
    } else if (!flags.w_file.empty()) {
        std::ifstream in(flags.w_file);
        if (!in) throw ParseError("cannot open " + flags.w_file, 0);
        Matrix w = read_matrix_tsv(in);
        for (int c = 0; c < w.cols(); ++c) {
            const double sum = w.col(c).sum();
            if (!(sum > 0.0)) throw ZeroRow("column " + std::to_string(c + 1) + " of W is zero", c);
            w.col(c) /= sum;
        }
        const GeneratedA gen = generate_a(flags.p, static_cast<int>(w.rows()), 1,
                                          0.5 / static_cast<double>(flags.p), flags.seed);
        model = validate_topic_model(gen.a, w);
    } else {
        model = random_identifiable_model(flags.p, flags.k, flags.n, flags.seed);
    }

    const Assumption3Result sep = check_assumption3(model.w);
    std::cout << "p = " << model.p << ", k = " << model.k << ", n = " << model.n << "\n";
    std::cout << "row-separation nu = " << format_double(sep.nu) << " ("
              << (sep.holds ? "holds" : "fails") << ")\n";

    const PopulationFit recovered = population_fit(model);
    const AlignedLoss loss = aligned_losses(recovered.a_hat, model.a);
    std::cout << "k_hat = " << recovered.partition.k_hat() << "\n";
    std::cout << "partition:\n";
    write_partition(recovered.partition, std::cout);
    std::cout << "max aligned column error = " << format_double(loss.l1_inf) << "\n";
    std::cout << "total aligned error = " << format_double(loss.l1) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// cv

struct CvFlags {
    std::string input;
    std::string format = "uci";
    std::string grid = "0.5,1.1,5.0";
    double split = 0.5;
    double c0 = 0.01;
    std::uint64_t seed = 0;
};

int cmd_cv(const CvFlags& flags) {
    std::vector<double> grid;
    std::stringstream list(flags.grid);
    std::string token;
    while (std::getline(list, token, ',')) {
        try {
            grid.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw Error("bad grid value '" + token + "'");
        }
        if (!(grid.back() > 0.0)) throw Error("grid values must be positive");
    }
    if (grid.empty()) throw Error("empty grid");

    const CountData data = load_corpus(flags.input, flags.format);
    TuningProfile tuning{flags.c0, 1.1, 1, flags.seed};
    const CvReport report = cross_validate_c1_report(data, grid, flags.split, tuning);
    std::cout << "c1\tloss\n";
    for (std::size_t g = 0; g < report.grid.size(); ++g) {
        std::cout << format_double(report.grid[g]) << '\t';
        if (std::isnan(report.losses[g]))
            std::cout << "failed\n";
        else
            std::cout << format_double(report.losses[g]) << "\n";
    }
    std::cout << "selected c1 = " << format_double(report.selected) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::ostringstream invocation;
    for (int i = 0; i < argc; ++i) invocation << (i ? " " : "") << argv[i];
    g_invocation = invocation.str();

    CLI::App app{"Anchor-word topic model estimation"};
    app.require_subcommand(1);

    FitFlags fit_flags;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Estimate the word-topic matrix from a corpus");
    fit_cmd->add_option("--input", fit_flags.input, "corpus file")->required();
    fit_cmd->add_option("--format", fit_flags.format, "uci or tsv");
    fit_cmd->add_option("--c0", fit_flags.c0, "LP margin scale");
    fit_cmd->add_option("--c1", fit_flags.c1, "anchor margin scale");
    fit_cmd->add_option("--reps", fit_flags.reps, "representative-set draws");
    fit_cmd->add_option("--seed", fit_flags.seed, "RNG seed");
    fit_cmd->add_option("--out-dir", fit_flags.out_dir, "output directory");
    fit_cmd->add_option("--moment-cache", fit_flags.moment_cache, "binary moment cache path");

    SimFlags sim_flags;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Synthetic sweep: generate, sample, fit, evaluate");
    sim_cmd->add_option("--p", sim_flags.base.p, "dictionary size");
    sim_cmd->add_option("--k", sim_flags.base.k, "topics");
    sim_cmd->add_option("--n", sim_flags.base.n, "documents");
    sim_cmd->add_option("--doc-length", sim_flags.base.doc_length, "words per document");
    sim_cmd->add_option("--anchors-per-topic", sim_flags.base.anchors, "anchor words per topic");
    sim_cmd->add_option("--xi", sim_flags.base.xi, "anchor frequency scale (default 1/p)");
    sim_cmd->add_option("--vary", sim_flags.vary, "sweep one parameter: name=v1,v2,...")->take_all();
    sim_cmd->add_option("--replicates", sim_flags.replicates, "replicates per setting");
    sim_cmd->add_option("--seed", sim_flags.seed, "RNG seed");
    sim_cmd->add_option("--c0", sim_flags.c0, "LP margin scale");
    sim_cmd->add_option("--c1", sim_flags.c1, "anchor margin scale");
    sim_cmd->add_option("--reps", sim_flags.reps, "representative-set draws");
    sim_cmd->add_option("--jobs", sim_flags.jobs, "worker threads (default: cores or TOP_JOBS)");
    sim_cmd->add_option("--out-dir", sim_flags.out_dir, "output directory");

    OracleFlags oracle_flags;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "Noiseless recovery check on a known model");
    oracle_cmd->add_flag("--demo", oracle_flags.demo, "use the built-in 6x3 demo model");
    oracle_cmd->add_option("--p", oracle_flags.p, "dictionary size (generated model)");
    oracle_cmd->add_option("--k", oracle_flags.k, "topics (generated model)");
    oracle_cmd->add_option("--n", oracle_flags.n, "documents (generated model)");
    oracle_cmd->add_option("--seed", oracle_flags.seed, "RNG seed");
    oracle_cmd->add_option("--w-file", oracle_flags.w_file, "TSV topic-weight matrix to use as W");

    CvFlags cv_flags;
    CLI::App* cv_cmd = app.add_subcommand("cv", "Cross-validate the anchor margin constant");
    cv_cmd->add_option("--input", cv_flags.input, "corpus file")->required();
    cv_cmd->add_option("--format", cv_flags.format, "uci or tsv");
    cv_cmd->add_option("--grid", cv_flags.grid, "comma-separated candidate values");
    cv_cmd->add_option("--split", cv_flags.split, "training fraction in (0,1)");
    cv_cmd->add_option("--c0", cv_flags.c0, "LP margin scale");
    cv_cmd->add_option("--seed", cv_flags.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_flags);
        if (sim_cmd->parsed()) return cmd_simulate(sim_flags);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_flags);
        if (cv_cmd->parsed()) return cmd_cv(cv_flags);
    } catch (const NoAnchorsFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const AssumptionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const SingularGram& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const LpFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLp;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
