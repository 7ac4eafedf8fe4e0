#include "trajmatch/analysis.hpp"

#include "trajmatch/errors.hpp"
#include "trajmatch/parallel.hpp"
#include "trajmatch/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

namespace trajmatch {

double bonferroni_threshold(double alpha, std::size_t iterations)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InputError("alpha must lie in (0, 1)");
    if (iterations == 0)
        throw InputError("Bonferroni correction needs at least one test");
    return alpha / static_cast<double>(iterations);
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> ids)
    : ids_(std::move(ids)), entries_(ids_.size() * ids_.size(), 0.0)
{
    for (std::size_t i = 0; i < ids_.size(); ++i)
        entries_[i * ids_.size() + i] = 1.0;
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, double value)
{
    entries_[i * ids_.size() + j] = value;
    entries_[j * ids_.size() + i] = value;
}

std::size_t SimilarityMatrix::index_of(const std::string& id) const
{
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end())
        throw InputError("algorithm '" + id + "' not in similarity matrix");
    return static_cast<std::size_t>(it - ids_.begin());
}

void SimilarityMatrix::validate() const
{
    const std::size_t n = ids_.size();
    if (entries_.size() != n * n)
        throw InputError("similarity matrix has the wrong number of entries");
    for (std::size_t i = 0; i < n; ++i) {
        if ((*this)(i, i) != 1.0)
            throw InputError("similarity matrix diagonal must be 1 (row " + ids_[i] + ")");
        for (std::size_t j = 0; j < n; ++j) {
            double v = (*this)(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw InputError("similarity (" + ids_[i] + ", " + ids_[j] + ") outside [0, 1]");
            if (v != (*this)(j, i))
                throw InputError("similarity matrix is not symmetric at (" + ids_[i] + ", " + ids_[j] + ")");
        }
    }
}

namespace {

using FeatureTrajectory = std::vector<std::vector<Point>>; // [iteration][member]

FeatureTrajectory scaled_features(const Trajectory& t, const ScalingParams& scaling, bool include_fitness)
{
    Trajectory scaled = apply_scaling(t, scaling);
    FeatureTrajectory out;
    out.reserve(scaled.populations.size());
    for (const Population& p : scaled.populations)
        out.push_back(feature_vectors(p, include_fitness));
    return out;
}

void check_comparable(const Trajectory& a, const Trajectory& b)
{
    if (a.problem_id != b.problem_id || a.dimension != b.dimension || a.run != b.run)
        throw InputError("cannot compare trajectories of different (problem, dim, run): " + a.problem_id + "/" +
                         std::to_string(a.dimension) + "/" + std::to_string(a.run) + " vs " + b.problem_id + "/" +
                         std::to_string(b.dimension) + "/" + std::to_string(b.run));
    if (a.iterations() != b.iterations())
        throw InputError("iteration count mismatch: " + a.algorithm_id + " has " + std::to_string(a.iterations()) +
                         ", " + b.algorithm_id + " has " + std::to_string(b.iterations()));
    if (a.population_size() != b.population_size())
        throw InputError("population size mismatch between " + a.algorithm_id + " and " + b.algorithm_id);
}

RunComparison compare_features(const Trajectory& a, const Trajectory& b, const FeatureTrajectory& fa,
                               const FeatureTrajectory& fb, const AnalysisOptions& options)
{
    const std::size_t iterations = fa.size();
    const double threshold = bonferroni_threshold(options.alpha, iterations);

    RunComparison cmp;
    cmp.algorithm_a = a.algorithm_id;
    cmp.algorithm_b = b.algorithm_id;
    cmp.problem_id = a.problem_id;
    cmp.dimension = a.dimension;
    cmp.run = a.run;
    cmp.per_iteration.reserve(iterations);
    std::size_t kept = 0;
    for (std::size_t it = 0; it < iterations; ++it) {
        CrossmatchResult r = crossmatch_test(fa[it], fb[it], options.tie_mode);
        IterationOutcome o{it, r.a1, r.p_value, r.p_value < threshold};
        if (!o.rejected)
            ++kept;
        cmp.per_iteration.push_back(o);
    }
    cmp.similarity = static_cast<double>(kept) / static_cast<double>(iterations);
    return cmp;
}

} // namespace

RunComparison compare_run(const Trajectory& a, const Trajectory& b, const ScalingParams& scaling,
                          const AnalysisOptions& options)
{
    check_comparable(a, b);
    return compare_features(a, b, scaled_features(a, scaling, options.include_fitness),
                            scaled_features(b, scaling, options.include_fitness), options);
}

std::vector<SeriesPoint> statistic_series(const Trajectory& a, const Trajectory& b, const ScalingParams& scaling,
                                          const AnalysisOptions& options)
{
    RunComparison cmp = compare_run(a, b, scaling, options);
    std::vector<SeriesPoint> series;
    series.reserve(cmp.per_iteration.size());
    for (const auto& o : cmp.per_iteration)
        series.push_back({o.iteration, o.a1});
    return series;
}

SimilarityReport pairwise_similarity(const TrajectoryStore& store, const AnalysisOptions& options)
{
    const std::vector<std::string> ids = store.algorithms();
    if (ids.size() < 2)
        throw InputError("similarity needs at least 2 algorithms (found " + std::to_string(ids.size()) + ")");
    bonferroni_threshold(options.alpha, 1); // validates alpha up front

    // Every algorithm must cover every (problem, dim, run) present.
    const auto instances = store.problem_instances();
    struct Slot {
        std::string problem;
        std::size_t dim;
        std::size_t run;
    };
    std::vector<Slot> slots;
    for (const auto& [problem, dim] : instances)
        for (std::size_t run : store.runs(problem, dim)) {
            for (const auto& id : ids)
                if (store.find({id, problem, dim, run}) == nullptr)
                    throw InputError("algorithm '" + id + "' has no trajectory for (" + problem + ", dim " +
                                     std::to_string(dim) + ", run " + std::to_string(run) + ")");
            slots.push_back({problem, dim, run});
        }

    // Scale once per problem instance, then precompute feature vectors.
    std::map<std::pair<std::string, std::size_t>, ScalingParams> scaling;
    for (const auto& inst : instances)
        scaling.emplace(inst, compute_scaling(store, inst.first, inst.second));
    std::vector<const Trajectory*> trajectories;
    for (const auto& [key, t] : store)
        trajectories.push_back(&t);
    std::vector<FeatureTrajectory> features(trajectories.size());
    parallel_for(trajectories.size(), options.threads, [&](std::size_t i) {
        const Trajectory& t = *trajectories[i];
        features[i] = scaled_features(t, scaling.at({t.problem_id, t.dimension}), options.include_fitness);
    });
    std::map<TrajectoryKey, std::size_t> feature_index;
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        feature_index.emplace(trajectories[i]->key(), i);

    struct Task {
        std::size_t a;
        std::size_t b;
        std::size_t slot;
    };
    std::vector<Task> tasks;
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b)
            for (std::size_t s = 0; s < slots.size(); ++s)
                tasks.push_back({a, b, s});

    std::vector<RunComparison> comparisons(tasks.size());
    parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
        const Task& task = tasks[i];
        const Slot& slot = slots[task.slot];
        const std::size_t ia = feature_index.at({ids[task.a], slot.problem, slot.dim, slot.run});
        const std::size_t ib = feature_index.at({ids[task.b], slot.problem, slot.dim, slot.run});
        check_comparable(*trajectories[ia], *trajectories[ib]);
        comparisons[i] = compare_features(*trajectories[ia], *trajectories[ib], features[ia], features[ib], options);
    });

    SimilarityReport report;
    report.dimensions = store.dimensions();
    for (std::size_t dim : report.dimensions) {
        SimilarityMatrix m(ids);
        for (std::size_t a = 0; a < ids.size(); ++a) {
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t i = 0; i < tasks.size(); ++i) {
                    if (tasks[i].a != a || tasks[i].b != b || slots[tasks[i].slot].dim != dim)
                        continue;
                    sum += comparisons[i].similarity;
                    ++count;
                }
                m.set(a, b, sum / static_cast<double>(count));
            }
        }
        report.per_dimension.push_back(std::move(m));
    }

    report.overall = SimilarityMatrix(ids);
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            double sum = 0.0;
            for (const auto& m : report.per_dimension)
                sum += m(a, b);
            report.overall.set(a, b, sum / static_cast<double>(report.per_dimension.size()));
        }
    }
    report.comparisons = std::move(comparisons);
    return report;
}

void write_matrix_csv(const SimilarityMatrix& m, std::ostream& out)
{
    out << "algorithm";
    for (const auto& id : m.ids())
        out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.ids()[i];
        for (std::size_t j = 0; j < m.size(); ++j)
            out << ',' << format_double(m(i, j));
        out << '\n';
    }
}

SimilarityMatrix read_matrix_csv(std::istream& in)
{
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        std::vector<std::string> fields;
        for (auto f : split_csv_line(line))
            fields.emplace_back(f);
        rows.push_back(std::move(fields));
    }
    if (rows.empty())
        throw InputError("similarity matrix file is empty");
    const auto& header = rows.front();
    if (header.size() < 2)
        throw InputError("similarity matrix header needs at least one algorithm id");
    std::vector<std::string> ids(header.begin() + 1, header.end());
    if (rows.size() != ids.size() + 1)
        throw InputError("similarity matrix has " + std::to_string(rows.size() - 1) + " rows for " +
                         std::to_string(ids.size()) + " algorithms");

    SimilarityMatrix m(ids);
    std::vector<double> values(ids.size() * ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& row = rows[i + 1];
        if (row.size() != ids.size() + 1)
            throw InputError("matrix row " + std::to_string(i + 2) + ": expected " + std::to_string(ids.size() + 1) +
                             " fields");
        if (row[0] != ids[i])
            throw InputError("matrix row " + std::to_string(i + 2) + ": label '" + row[0] + "' does not match header '" +
                             ids[i] + "'");
        for (std::size_t j = 0; j < ids.size(); ++j) {
            auto v = parse_double(row[j + 1]);
            if (!v)
                throw InputError("matrix row " + std::to_string(i + 2) + ": invalid number '" + row[j + 1] + "'");
            values[i * ids.size() + j] = *v;
        }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i; j < ids.size(); ++j) {
            if (values[i * ids.size() + j] != values[j * ids.size() + i])
                throw InputError("similarity matrix is not symmetric at (" + ids[i] + ", " + ids[j] + ")");
            if (i == j && values[i * ids.size() + i] != 1.0)
                throw InputError("similarity matrix diagonal must be 1 (row " + ids[i] + ")");
            if (i != j)
                m.set(i, j, values[i * ids.size() + j]);
        }
    }
    m.validate();
    return m;
}

void write_series_csv(const std::vector<RunComparison>& comparisons, std::ostream& out)
{
    out << "algorithm_a,algorithm_b,problem,dim,run,iteration,a1,p_value,rejected\n";
    for (const auto& c : comparisons)
        for (const auto& o : c.per_iteration)
            out << c.algorithm_a << ',' << c.algorithm_b << ',' << c.problem_id << ',' << c.dimension << ','
                << c.run << ',' << o.iteration << ',' << o.a1 << ',' << format_double(o.p_value) << ','
                << (o.rejected ? 1 : 0) << '\n';
}

std::vector<RunComparison> read_series_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw InputError("series file is empty");
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "algorithm_a,algorithm_b,problem,dim,run,iteration,a1,p_value,rejected")
        throw InputError("series file: unexpected header");

    std::vector<RunComparison> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        auto f = split_csv_line(line);
        auto fail = [&](const std::string& what) {
            return InputError("series row " + std::to_string(line_no) + ": " + what);
        };
        if (f.size() != 9)
            throw fail("expected 9 fields");
        auto dim = parse_integer(f[3]);
        auto run = parse_integer(f[4]);
        auto iteration = parse_integer(f[5]);
        auto a1 = parse_integer(f[6]);
        auto p = parse_double(f[7]);
        auto rejected = parse_integer(f[8]);
        if (!dim || !run || !iteration || !a1 || !p || !rejected || *dim < 0 || *run < 0 || *iteration < 0 ||
            *a1 < 0 || (*rejected != 0 && *rejected != 1))
            throw fail("malformed value");
        const bool same = !out.empty() && out.back().algorithm_a == f[0] && out.back().algorithm_b == f[1] &&
                          out.back().problem_id == f[2] &&
                          out.back().dimension == static_cast<std::size_t>(*dim) &&
                          out.back().run == static_cast<std::size_t>(*run);
        if (!same) {
            RunComparison c;
            c.algorithm_a = std::string(f[0]);
            c.algorithm_b = std::string(f[1]);
            c.problem_id = std::string(f[2]);
            c.dimension = static_cast<std::size_t>(*dim);
            c.run = static_cast<std::size_t>(*run);
            out.push_back(std::move(c));
        }
        out.back().per_iteration.push_back(
            {static_cast<std::size_t>(*iteration), static_cast<std::size_t>(*a1), *p, *rejected == 1});
    }
    for (auto& c : out) {
        std::size_t kept = 0;
        for (const auto& o : c.per_iteration)
            kept += o.rejected ? 0 : 1;
        c.similarity = static_cast<double>(kept) / static_cast<double>(c.per_iteration.size());
    }
    return out;
}

} // namespace trajmatch
