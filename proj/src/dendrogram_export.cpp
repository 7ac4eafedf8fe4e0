#include "trajmatch/cluster.hpp"
#include "trajmatch/errors.hpp"
#include "trajmatch/text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

namespace trajmatch {

DendrogramFormat parse_dendrogram_format(std::string_view text)
{
    if (text == "newick")
        return DendrogramFormat::Newick;
    if (text == "json")
        return DendrogramFormat::Json;
    if (text == "svg")
        return DendrogramFormat::Svg;
    throw InputError("unknown dendrogram format '" + std::string(text) + "' (expected newick, json or svg)");
}

namespace {

double node_height(const Dendrogram& dg, std::size_t node)
{
    const std::size_t n = dg.leaves.size();
    return node < n ? 0.0 : dg.merges.at(node - n).height;
}

std::size_t root_of(const Dendrogram& dg)
{
    return dg.merges.empty() ? 0 : dg.merges.back().node;
}

std::string newick_label(const std::string& name)
{
    if (name.find_first_of(" ()[]':;,\t") == std::string::npos)
        return name;
    std::string quoted = "'";
    for (char c : name) {
        if (c == '\'')
            quoted += '\'';
        quoted += c;
    }
    return quoted + "'";
}

void newick(const Dendrogram& dg, std::size_t node, std::string& out)
{
    const std::size_t n = dg.leaves.size();
    if (node < n) {
        out += newick_label(dg.leaves[node]);
        return;
    }
    const Merge& m = dg.merges.at(node - n);
    out += '(';
    newick(dg, m.node_a, out);
    out += ':' + format_double(m.height - node_height(dg, m.node_a));
    out += ',';
    newick(dg, m.node_b, out);
    out += ':' + format_double(m.height - node_height(dg, m.node_b));
    out += ')';
}

std::string fixed2(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
    return std::string(buf.data(), ptr);
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string svg(const Dendrogram& dg)
{
    constexpr double kLabelWidth = 160.0;
    constexpr double kPlotWidth = 420.0;
    constexpr double kRowHeight = 22.0;
    constexpr double kMargin = 20.0;

    const std::size_t n = dg.leaves.size();
    const double max_height = dg.merges.empty() ? 0.0 : dg.merges.back().height;
    const double scale = max_height > 0.0 ? kPlotWidth / max_height : 0.0;
    const auto order = leaves_under(dg, root_of(dg));

    std::vector<double> y(n + dg.merges.size(), 0.0);
    for (std::size_t row = 0; row < order.size(); ++row)
        y[order[row]] = kMargin + kRowHeight * (static_cast<double>(row) + 0.5);
    for (const Merge& m : dg.merges)
        y[m.node] = 0.5 * (y[m.node_a] + y[m.node_b]);
    auto x_of = [&](double h) { return kMargin + kLabelWidth + h * scale; };

    const double width = kMargin * 2 + kLabelWidth + kPlotWidth + 40.0;
    const double height = kMargin * 2 + kRowHeight * static_cast<double>(n) + 20.0;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\"" << fixed2(height)
        << "\" viewBox=\"0 0 " << fixed2(width) << ' ' << fixed2(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t leaf : order)
        out << "<text x=\"" << fixed2(x_of(0.0) - 6.0) << "\" y=\"" << fixed2(y[leaf] + 4.0)
            << "\" text-anchor=\"end\">" << xml_escape(dg.leaves[leaf]) << "</text>\n";
    out << "</g>\n<g stroke=\"black\" stroke-width=\"1.5\" fill=\"none\">\n";
    for (const Merge& m : dg.merges) {
        const double xm = x_of(m.height);
        for (std::size_t child : {m.node_a, m.node_b})
            out << "<line x1=\"" << fixed2(x_of(node_height(dg, child))) << "\" y1=\"" << fixed2(y[child])
                << "\" x2=\"" << fixed2(xm) << "\" y2=\"" << fixed2(y[child]) << "\"/>\n";
        out << "<line x1=\"" << fixed2(xm) << "\" y1=\"" << fixed2(y[m.node_a]) << "\" x2=\"" << fixed2(xm)
            << "\" y2=\"" << fixed2(y[m.node_b]) << "\"/>\n";
    }
    out << "</g>\n";
    const double axis_y = kMargin + kRowHeight * static_cast<double>(n) + 8.0;
    out << "<line x1=\"" << fixed2(x_of(0.0)) << "\" y1=\"" << fixed2(axis_y) << "\" x2=\""
        << fixed2(x_of(max_height)) << "\" y2=\"" << fixed2(axis_y) << "\" stroke=\"gray\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"gray\">\n";
    out << "<text x=\"" << fixed2(x_of(0.0)) << "\" y=\"" << fixed2(axis_y + 12.0) << "\">0</text>\n";
    out << "<text x=\"" << fixed2(x_of(max_height)) << "\" y=\"" << fixed2(axis_y + 12.0)
        << "\" text-anchor=\"end\">" << format_double(max_height) << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

} // namespace

std::string export_dendrogram(const Dendrogram& dg, DendrogramFormat format)
{
    switch (format) {
    case DendrogramFormat::Newick: {
        std::string out;
        newick(dg, root_of(dg), out);
        return out + ";\n";
    }
    case DendrogramFormat::Json: {
        nlohmann::json merges = nlohmann::json::array();
        for (const Merge& m : dg.merges)
            merges.push_back({{"a", m.node_a}, {"b", m.node_b}, {"height", m.height}, {"node", m.node}});
        nlohmann::json doc{{"leaves", dg.leaves}, {"merges", std::move(merges)}};
        return doc.dump(2) + "\n";
    }
    case DendrogramFormat::Svg:
        return svg(dg);
    }
    throw InputError("unknown dendrogram format");
}

std::string export_dendrogram(const Dendrogram& dg, std::string_view format)
{
    return export_dendrogram(dg, parse_dendrogram_format(format));
}

Dendrogram dendrogram_from_json(std::string_view text)
{
    Dendrogram dg;
    try {
        auto doc = nlohmann::json::parse(text);
        dg.leaves = doc.at("leaves").get<std::vector<std::string>>();
        for (const auto& m : doc.at("merges"))
            dg.merges.push_back({m.at("a").get<std::size_t>(), m.at("b").get<std::size_t>(),
                                 m.at("height").get<double>(), m.at("node").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("invalid dendrogram JSON: ") + e.what());
    }
    const std::size_t n = dg.leaves.size();
    if (n < 2 || dg.merges.size() != n - 1)
        throw InputError("dendrogram JSON needs n leaves and n - 1 merges");
    std::vector<char> consumed(2 * n - 1, 0);
    for (std::size_t k = 0; k < dg.merges.size(); ++k) {
        const Merge& m = dg.merges[k];
        if (m.node != n + k || m.node_a >= m.node || m.node_b >= m.node || m.node_a == m.node_b ||
            consumed[m.node_a] || consumed[m.node_b])
            throw InputError("dendrogram JSON merge " + std::to_string(k) + " is inconsistent");
        consumed[m.node_a] = consumed[m.node_b] = 1;
    }
    return dg;
}

} // namespace trajmatch
