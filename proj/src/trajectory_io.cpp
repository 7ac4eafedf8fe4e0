#include "trajmatch/errors.hpp"
#include "trajmatch/text_util.hpp"
#include "trajmatch/trajectory.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace trajmatch {

namespace {

constexpr std::size_t kFixedColumns = 7;
constexpr const char* kFixedHeader[kFixedColumns] = {"algorithm", "problem", "dim",    "run",
                                                      "iteration", "member",  "fitness"};

struct MemberRow {
    double fitness = 0.0;
    Point x;
};

using IterationRows = std::map<std::size_t, std::map<std::size_t, MemberRow>>;

std::string row_error(std::size_t line, const std::string& what)
{
    return "row " + std::to_string(line) + ": " + what;
}

std::size_t parse_index(std::string_view field, const char* name, std::size_t line)
{
    auto v = parse_integer(field);
    if (!v || *v < 0)
        throw InputError(row_error(line, std::string("invalid ") + name + " '" + std::string(field) + "'"));
    return static_cast<std::size_t>(*v);
}

double parse_finite(std::string_view field, const std::string& name, std::size_t line)
{
    auto v = parse_double(field);
    if (!v)
        throw InputError(row_error(line, "invalid " + name + " '" + std::string(field) + "'"));
    if (!std::isfinite(*v))
        throw InputError(row_error(line, "non-finite " + name));
    return *v;
}

TrajectoryStore assemble(std::map<TrajectoryKey, IterationRows>& rows)
{
    TrajectoryStore store;
    for (auto& [key, iterations] : rows) {
        Trajectory t;
        t.algorithm_id = key.algorithm;
        t.problem_id = key.problem;
        t.dimension = key.dim;
        t.run = key.run;
        for (auto& [iteration, members] : iterations) {
            Population p;
            p.iteration = iteration;
            std::size_t expected = 0;
            for (auto& [member, row] : members) {
                if (member != expected)
                    throw InputError("trajectory (" + key.algorithm + ", " + key.problem + ", dim " +
                                     std::to_string(key.dim) + ", run " + std::to_string(key.run) + ") iteration " +
                                     std::to_string(iteration) + ": member indices must be consecutive from 0");
                ++expected;
                p.solutions.push_back(std::move(row.x));
                p.fitness.push_back(row.fitness);
            }
            t.populations.push_back(std::move(p));
        }
        store.add(std::move(t));
    }
    if (store.empty())
        throw InputError("trajectory file contains no data rows");
    return store;
}

} // namespace

TrajectoryStore read_trajectories_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t x_columns = 0;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF"))
            line.erase(0, 3);
        auto fields = split_csv_line(line);
        if (fields.size() < kFixedColumns + 1)
            throw InputError(row_error(line_no, "header needs algorithm,problem,dim,run,iteration,member,fitness,x0,..."));
        for (std::size_t c = 0; c < kFixedColumns; ++c)
            if (fields[c] != kFixedHeader[c])
                throw InputError(row_error(line_no, "expected header column '" + std::string(kFixedHeader[c]) +
                                                        "', found '" + std::string(fields[c]) + "'"));
        for (std::size_t c = kFixedColumns; c < fields.size(); ++c)
            if (fields[c] != "x" + std::to_string(c - kFixedColumns))
                throw InputError(row_error(line_no, "expected header column 'x" +
                                                        std::to_string(c - kFixedColumns) + "', found '" +
                                                        std::string(fields[c]) + "'"));
        x_columns = fields.size() - kFixedColumns;
        have_header = true;
    }
    if (!have_header)
        throw InputError("trajectory file is empty");

    std::map<TrajectoryKey, IterationRows> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        auto fields = split_csv_line(line);
        if (fields.size() < kFixedColumns + 1)
            throw InputError(row_error(line_no, "too few fields"));
        TrajectoryKey key;
        key.algorithm = std::string(fields[0]);
        key.problem = std::string(fields[1]);
        if (key.algorithm.empty() || key.problem.empty())
            throw InputError(row_error(line_no, "empty algorithm or problem id"));
        key.dim = parse_index(fields[2], "dim", line_no);
        key.run = parse_index(fields[3], "run", line_no);
        const std::size_t iteration = parse_index(fields[4], "iteration", line_no);
        const std::size_t member = parse_index(fields[5], "member", line_no);
        if (key.dim == 0 || key.dim > x_columns)
            throw InputError(row_error(line_no, "dim " + std::to_string(key.dim) + " not covered by the " +
                                                    std::to_string(x_columns) + " x-columns of the header"));
        const std::size_t used = kFixedColumns + key.dim;
        if (fields.size() != used && fields.size() != kFixedColumns + x_columns)
            throw InputError(row_error(line_no, "expected " + std::to_string(used) + " fields, found " +
                                                    std::to_string(fields.size())));
        for (std::size_t c = used; c < fields.size(); ++c)
            if (!fields[c].empty())
                throw InputError(row_error(line_no, "unexpected value in column x" +
                                                        std::to_string(c - kFixedColumns) + " for dim " +
                                                        std::to_string(key.dim)));

        MemberRow row;
        row.fitness = parse_finite(fields[6], "fitness", line_no);
        row.x.reserve(key.dim);
        for (std::size_t c = 0; c < key.dim; ++c)
            row.x.push_back(parse_finite(fields[kFixedColumns + c], "x" + std::to_string(c), line_no));

        auto& members = rows[key][iteration];
        if (!members.emplace(member, std::move(row)).second)
            throw InputError(row_error(line_no, "duplicate member " + std::to_string(member) + " of iteration " +
                                                    std::to_string(iteration)));
    }
    return assemble(rows);
}

TrajectoryStore read_trajectories_json(std::istream& in)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed trajectory JSON: ") + e.what());
    }
    if (!doc.is_array())
        throw InputError("trajectory JSON must be an array of trajectory objects");

    TrajectoryStore store;
    try {
        for (std::size_t idx = 0; idx < doc.size(); ++idx) {
            const auto& obj = doc[idx];
            Trajectory t;
            t.algorithm_id = obj.at("algorithm").get<std::string>();
            t.problem_id = obj.at("problem").get<std::string>();
            t.dimension = obj.at("dim").get<std::size_t>();
            t.run = obj.at("run").get<std::size_t>();
            for (const auto& pj : obj.at("populations")) {
                Population p;
                p.iteration = pj.at("iteration").get<std::size_t>();
                p.solutions = pj.at("solutions").get<std::vector<Point>>();
                p.fitness = pj.at("fitness").get<std::vector<double>>();
                t.populations.push_back(std::move(p));
            }
            store.add(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("invalid trajectory JSON: ") + e.what());
    }
    if (store.empty())
        throw InputError("trajectory file contains no trajectories");
    return store;
}

TrajectoryStore load_trajectories(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open trajectory file '" + path.string() + "'");
    if (path.extension() == ".json")
        return read_trajectories_json(in);
    return read_trajectories_csv(in);
}

void write_trajectories_csv(const TrajectoryStore& store, std::ostream& out)
{
    std::size_t x_columns = 0;
    for (const auto& [key, t] : store)
        x_columns = std::max(x_columns, t.dimension);

    out << "algorithm,problem,dim,run,iteration,member,fitness";
    for (std::size_t c = 0; c < x_columns; ++c)
        out << ",x" << c;
    out << '\n';
    for (const auto& [key, t] : store) {
        for (const Population& p : t.populations) {
            for (std::size_t r = 0; r < p.size(); ++r) {
                out << t.algorithm_id << ',' << t.problem_id << ',' << t.dimension << ',' << t.run << ','
                    << p.iteration << ',' << r << ',' << format_double(p.fitness[r]);
                for (double v : p.solutions[r])
                    out << ',' << format_double(v);
                for (std::size_t c = t.dimension; c < x_columns; ++c)
                    out << ',';
                out << '\n';
            }
        }
    }
}

void write_trajectories_json(const TrajectoryStore& store, std::ostream& out)
{
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& [key, t] : store) {
        nlohmann::json pops = nlohmann::json::array();
        for (const Population& p : t.populations)
            pops.push_back({{"iteration", p.iteration}, {"solutions", p.solutions}, {"fitness", p.fitness}});
        doc.push_back({{"algorithm", t.algorithm_id},
                       {"problem", t.problem_id},
                       {"dim", t.dimension},
                       {"run", t.run},
                       {"populations", std::move(pops)}});
    }
    out << doc.dump() << '\n';
}

void save_trajectories(const TrajectoryStore& store, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write trajectory file '" + path.string() + "'");
    if (path.extension() == ".json")
        write_trajectories_json(store, out);
    else
        write_trajectories_csv(store, out);
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

} // namespace trajmatch
