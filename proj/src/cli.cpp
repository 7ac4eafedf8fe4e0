#include "trajmatch/cli.hpp"

#include "trajmatch/analysis.hpp"
#include "trajmatch/cluster.hpp"
#include "trajmatch/errors.hpp"
#include "trajmatch/portfolio.hpp"
#include "trajmatch/text_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace trajmatch {

namespace {

namespace fs = std::filesystem;

std::size_t default_threads()
{
    if (const char* env = std::getenv("TRAJMATCH_THREADS")) {
        auto v = parse_integer(env);
        if (!v || *v < 1)
            throw InputError("TRAJMATCH_THREADS must be a positive integer");
        return static_cast<std::size_t>(*v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    return in;
}

fs::path dimension_matrix_path(const fs::path& matrix, std::size_t dim)
{
    fs::path p = matrix;
    p.replace_filename(matrix.stem().string() + ".dim" + std::to_string(dim) + matrix.extension().string());
    return p;
}

struct GenerateArgs {
    std::string algorithms = "random_search,de_rand_1_bin,sade,ga,pso";
    std::string problems = "sphere,ellipsoid_rotated,rosenbrock,rastrigin,schwefel_1_2,gallagher";
    std::string dims = "2,5";
    std::size_t runs = 5;
    std::size_t pop = 50;
    std::size_t budget_factor = 500;
    std::uint64_t seed = 1;
    std::string out;
};

struct CompareArgs {
    std::string in;
    double alpha = 0.05;
    std::string tie_mode = "neutral";
    bool include_fitness = false;
    std::string out_matrix;
    std::string out_series;
};

struct ClusterArgs {
    std::string in;
    std::string format = "newick";
    std::string out;
};

struct ReportArgs {
    std::string matrix;
    std::string series;
    std::string dendrogram;
    std::size_t top = 10;
    std::string out;
};

int cmd_generate(const GenerateArgs& a, std::size_t threads, std::ostream& out)
{
    std::vector<std::string> algorithm_ids = split_list(a.algorithms);
    std::vector<std::string> problem_ids = split_list(a.problems);
    std::vector<std::size_t> dims;
    for (const auto& d : split_list(a.dims)) {
        auto v = parse_integer(d);
        if (!v || *v < 1)
            throw InputError("invalid dimension '" + d + "'");
        dims.push_back(static_cast<std::size_t>(*v));
    }
    if (algorithm_ids.empty() || problem_ids.empty() || dims.empty())
        throw InputError("--algorithms, --problems and --dims must not be empty");

    std::vector<AlgorithmSpec> specs;
    for (const auto& id : algorithm_ids)
        specs.push_back({id, {}, a.pop});
    const auto problems = builtin_suite(dims, problem_ids);

    RunConfig config;
    config.budget_factor = a.budget_factor;
    config.runs = a.runs;
    config.base_seed = a.seed;
    config.dimensions = dims;
    config.threads = threads;

    TrajectoryStore store = run_suite(specs, problems, config);
    save_trajectories(store, a.out);

    nlohmann::json cfg{{"algorithms", algorithm_ids}, {"problems", problem_ids}, {"dims", dims},
                       {"runs", a.runs},             {"pop", a.pop},             {"budget_factor", a.budget_factor},
                       {"seed", a.seed},             {"threads", threads}};
    nlohmann::json hp;
    for (const auto& id : algorithm_ids)
        hp[id] = default_hyperparameters(id);
    cfg["hyperparameters"] = hp;
    manifest::write(a.out, "generate", cfg, {}, {a.out});
    out << "wrote " << store.size() << " trajectories to " << a.out << '\n';
    return kExitOk;
}

int cmd_compare(const CompareArgs& a, std::size_t threads, std::ostream& out)
{
    AnalysisOptions options;
    options.alpha = a.alpha;
    options.tie_mode = parse_tie_mode(a.tie_mode);
    options.include_fitness = a.include_fitness;
    options.threads = threads;

    TrajectoryStore store = load_trajectories(a.in);
    SimilarityReport report = pairwise_similarity(store, options);

    std::vector<fs::path> outputs;
    auto emit_matrix = [&](const fs::path& path, const SimilarityMatrix& m) {
        std::ostringstream text;
        write_matrix_csv(m, text);
        write_text(path, text.str());
        outputs.push_back(path);
    };
    emit_matrix(a.out_matrix, report.overall);
    for (std::size_t k = 0; k < report.dimensions.size(); ++k)
        emit_matrix(dimension_matrix_path(a.out_matrix, report.dimensions[k]), report.per_dimension[k]);
    if (!a.out_series.empty()) {
        std::ostringstream text;
        write_series_csv(report.comparisons, text);
        write_text(a.out_series, text.str());
        outputs.emplace_back(a.out_series);
    }

    nlohmann::json cfg{{"in", a.in},
                       {"alpha", a.alpha},
                       {"tie_mode", std::string(to_string(options.tie_mode))},
                       {"include_fitness", a.include_fitness},
                       {"out_matrix", a.out_matrix},
                       {"out_series", a.out_series},
                       {"threads", threads}};
    manifest::write(a.out_matrix, "compare", cfg, {a.in}, outputs);
    out << "compared " << report.overall.size() << " algorithms over " << report.comparisons.size()
        << " runs; overall matrix written to " << a.out_matrix << '\n';
    return kExitOk;
}

int cmd_cluster(const ClusterArgs& a, std::ostream& out)
{
    const DendrogramFormat format = parse_dendrogram_format(a.format);
    auto in = open_input(a.in);
    SimilarityMatrix m = read_matrix_csv(in);
    Dendrogram dg = ward_cluster(to_dissimilarity(m));
    write_text(a.out, export_dendrogram(dg, format));
    manifest::write(a.out, "cluster", {{"in", a.in}, {"format", a.format}, {"out", a.out}, {"linkage", "ward"}},
                    {a.in}, {a.out});
    out << "clustered " << dg.leaves.size() << " algorithms into " << a.out << '\n';
    return kExitOk;
}

struct RankedPair {
    std::string a;
    std::string b;
    double score;
};

std::string fmt3(double v)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(3);
    s << v;
    return s.str();
}

int cmd_report(const ReportArgs& a, std::ostream& out)
{
    auto matrix_in = open_input(a.matrix);
    SimilarityMatrix m = read_matrix_csv(matrix_in);

    std::vector<RankedPair> pairs;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            auto [lo, hi] = std::minmax(m.ids()[i], m.ids()[j]);
            pairs.push_back({lo, hi, m(i, j)});
        }
    std::sort(pairs.begin(), pairs.end(), [](const RankedPair& x, const RankedPair& y) {
        if (x.score != y.score)
            return x.score > y.score;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    const std::size_t top = std::min(a.top, pairs.size());

    std::vector<RunComparison> series;
    std::vector<fs::path> inputs{a.matrix};
    if (!a.series.empty()) {
        auto series_in = open_input(a.series);
        series = read_series_csv(series_in);
        inputs.emplace_back(a.series);
    }
    if (!a.dendrogram.empty())
        inputs.emplace_back(a.dendrogram);

    std::ostringstream md;
    md << "# Search-behaviour similarity report\n\n";
    md << "Similarity matrix: `" << a.matrix << "` (" << m.size() << " algorithms, " << pairs.size()
       << " pairs).\n";
    if (!a.dendrogram.empty())
        md << "Dendrogram: `" << a.dendrogram << "`.\n";
    md << "\n## Top " << top << " most similar pairs\n\n";
    md << "Score: mean over dimensions of the mean fraction of iterations in which the crossmatch test did not "
          "reject equal population distributions.\n\n";
    md << "| rank | algorithm a | algorithm b | similarity |\n|---:|---|---|---:|\n";
    for (std::size_t k = 0; k < top; ++k)
        md << "| " << k + 1 << " | " << pairs[k].a << " | " << pairs[k].b << " | " << fmt3(pairs[k].score) << " |\n";

    if (!a.series.empty()) {
        // Key pairs without regard to (a, b) order in the series file.
        struct SeriesStats {
            std::size_t rows = 0;
            double a1_sum = 0.0;
            std::vector<double> run_similarity;
        };
        std::map<std::pair<std::string, std::string>, SeriesStats> stats;
        for (const auto& c : series) {
            auto key = std::minmax(c.algorithm_a, c.algorithm_b);
            auto& s = stats[{key.first, key.second}];
            s.rows += c.per_iteration.size();
            for (const auto& o : c.per_iteration)
                s.a1_sum += static_cast<double>(o.a1);
            s.run_similarity.push_back(c.similarity);
        }

        md << "\n## Statistic series\n\n";
        md << "Per-iteration crossmatch counts for each pair are the rows of `" << a.series
           << "` with the given `algorithm_a`, `algorithm_b`.\n\n";
        md << "| algorithm a | algorithm b | series file | rows | mean a1 |\n|---|---|---|---:|---:|\n";
        for (std::size_t k = 0; k < top; ++k) {
            auto it = stats.find({pairs[k].a, pairs[k].b});
            if (it == stats.end()) {
                md << "| " << pairs[k].a << " | " << pairs[k].b << " | `" << a.series << "` | 0 | - |\n";
                continue;
            }
            md << "| " << pairs[k].a << " | " << pairs[k].b << " | `" << a.series << "` | " << it->second.rows
               << " | " << fmt3(it->second.a1_sum / static_cast<double>(it->second.rows)) << " |\n";
        }

        md << "\n## Supplementary: run-level similarity distribution\n\n";
        md << "Not part of the similarity score above (which uses means only); medians and ranges of the "
              "per-run similarity across all problems, runs and dimensions.\n\n";
        md << "| algorithm a | algorithm b | runs | median | min | max |\n|---|---|---:|---:|---:|---:|\n";
        for (std::size_t k = 0; k < top; ++k) {
            auto it = stats.find({pairs[k].a, pairs[k].b});
            if (it == stats.end())
                continue;
            auto v = it->second.run_similarity;
            std::sort(v.begin(), v.end());
            const double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
            md << "| " << pairs[k].a << " | " << pairs[k].b << " | " << v.size() << " | " << fmt3(median) << " | "
               << fmt3(v.front()) << " | " << fmt3(v.back()) << " |\n";
        }
    }

    write_text(a.out, md.str());
    manifest::write(a.out, "report",
                    {{"matrix", a.matrix}, {"series", a.series}, {"dendrogram", a.dendrogram}, {"top", a.top},
                     {"out", a.out}},
                    inputs, {a.out});
    out << "report written to " << a.out << '\n';
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Compare optimization algorithms by the crossmatch similarity of their populations", "trajmatch"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: $TRAJMATCH_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Run the built-in portfolio and write trajectories");
    generate->add_option("--algorithms", gen.algorithms, "Comma-separated algorithm ids")->capture_default_str();
    generate->add_option("--problems", gen.problems, "Comma-separated problem ids")->capture_default_str();
    generate->add_option("--dims", gen.dims, "Comma-separated dimensions")->capture_default_str();
    generate->add_option("--runs", gen.runs, "Runs per (algorithm, problem)")->capture_default_str();
    generate->add_option("--pop", gen.pop, "Population size")->capture_default_str();
    generate->add_option("--budget-factor", gen.budget_factor, "Evaluations per dimension")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
    generate->add_option("--out", gen.out, "Trajectory file (.csv or .json)")->required();
    generate->add_option("--threads", threads, "Worker threads");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Crossmatch-compare all algorithm pairs");
    compare->add_option("--in", cmp.in, "Trajectory file")->required();
    compare->add_option("--alpha", cmp.alpha, "Family-wise significance level per run")->capture_default_str();
    compare->add_option("--tie-mode", cmp.tie_mode, "neutral | prefer-cross")->capture_default_str();
    compare->add_flag("--include-fitness", cmp.include_fitness, "Append scaled fitness to the feature vectors");
    compare->add_option("--out-matrix", cmp.out_matrix, "Overall similarity matrix CSV")->required();
    compare->add_option("--out-series", cmp.out_series, "Per-iteration statistic series CSV");
    compare->add_option("--threads", threads, "Worker threads");

    ClusterArgs clu;
    auto* cluster = app.add_subcommand("cluster", "Ward dendrogram from a similarity matrix");
    cluster->add_option("--in", clu.in, "Similarity matrix CSV")->required();
    cluster->add_option("--format", clu.format, "newick | json | svg")->capture_default_str();
    cluster->add_option("--out", clu.out, "Output file")->required();

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "Markdown summary of a comparison");
    report->add_option("--matrix", rep.matrix, "Similarity matrix CSV")->required();
    report->add_option("--series", rep.series, "Statistic series CSV");
    report->add_option("--dendrogram", rep.dendrogram, "Dendrogram file to reference");
    report->add_option("--top", rep.top, "Number of pairs to list")->capture_default_str();
    report->add_option("--out", rep.out, "Markdown output")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (threads == 0)
            threads = default_threads();
        if (app.got_subcommand(generate))
            return cmd_generate(gen, threads, out);
        if (app.got_subcommand(compare))
            return cmd_compare(cmp, threads, out);
        if (app.got_subcommand(cluster))
            return cmd_cluster(clu, out);
        return cmd_report(rep, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace trajmatch
