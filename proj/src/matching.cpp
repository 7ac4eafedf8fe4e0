#include "trajmatch/matching.hpp"

#include "trajmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace trajmatch {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries))
{
    if (entries_.size() != n_ * n_)
        throw InputError("distance matrix: expected " + std::to_string(n_ * n_) + " entries, got " +
                         std::to_string(entries_.size()));
    for (std::size_t i = 0; i < n_; ++i) {
        if (entries_[i * n_ + i] != 0.0)
            throw InputError("distance matrix: non-zero diagonal at " + std::to_string(i));
        for (std::size_t j = i + 1; j < n_; ++j) {
            double a = entries_[i * n_ + j];
            if (!std::isfinite(a) || a < 0.0)
                throw InputError("distance matrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") is negative or not finite");
            if (a != entries_[j * n_ + i])
                throw InputError("distance matrix: asymmetric at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
        }
    }
}

DistanceMatrix build_distance_matrix(std::span<const Point> points)
{
    const std::size_t n = points.size();
    if (n < 2)
        throw InputError("distance matrix needs at least 2 points");
    const std::size_t dim = points[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != dim)
            throw InputError("point " + std::to_string(i) + " has dimension " + std::to_string(points[i].size()) +
                             ", expected " + std::to_string(dim));
        for (double v : points[i])
            if (!std::isfinite(v))
                throw InputError("point " + std::to_string(i) + " has a non-finite coordinate");
    }

    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                double diff = points[i][c] - points[j][c];
                acc += diff * diff;
            }
            double dist = std::sqrt(acc);
            entries[i * n + j] = dist;
            entries[j * n + i] = dist;
        }
    }
    return DistanceMatrix(n, std::move(entries));
}

double matching_weight(const DistanceMatrix& d, std::span<const std::pair<std::size_t, std::size_t>> pairs)
{
    double total = 0.0;
    for (auto [i, j] : pairs)
        total += d(i, j);
    return total;
}

namespace {

void require_even(const DistanceMatrix& d, const char* who)
{
    if (d.size() == 0 || d.size() % 2 != 0)
        throw std::invalid_argument(std::string(who) + ": perfect matching needs an even, non-zero point count (got " +
                                    std::to_string(d.size()) + ")");
}

// Maximum-weight matching on a general graph via Edmonds' blossom algorithm
// with primal-dual updates, after Galil's O(n^3) formulation. Endpoints of
// edge k are numbered 2k and 2k+1; mate[v] holds the remote endpoint of v's
// matched edge. With max_cardinality set, the result is a maximum-weight
// matching among maximum-cardinality ones.
class BlossomMatcher {
public:
    BlossomMatcher(int nvertex, std::vector<int> ei, std::vector<int> ej, std::vector<double> w)
        : nv_(nvertex), ne_(static_cast<int>(w.size())), ei_(std::move(ei)), ej_(std::move(ej)), w_(std::move(w))
    {
        neighbend_.resize(nv_);
        for (int k = 0; k < ne_; ++k) {
            neighbend_[ei_[k]].push_back(2 * k + 1);
            neighbend_[ej_[k]].push_back(2 * k);
        }
        double maxweight = 0.0;
        for (double x : w_)
            maxweight = std::max(maxweight, x);

        mate_.assign(nv_, -1);
        label_.assign(2 * nv_, 0);
        labelend_.assign(2 * nv_, -1);
        inblossom_.resize(nv_);
        for (int v = 0; v < nv_; ++v)
            inblossom_[v] = v;
        blossomparent_.assign(2 * nv_, -1);
        blossomchilds_.assign(2 * nv_, {});
        blossombase_.assign(2 * nv_, -1);
        for (int v = 0; v < nv_; ++v)
            blossombase_[v] = v;
        blossomendps_.assign(2 * nv_, {});
        bestedge_.assign(2 * nv_, -1);
        blossombestedges_.assign(2 * nv_, {});
        has_bestedges_.assign(2 * nv_, 0);
        for (int b = nv_; b < 2 * nv_; ++b)
            unusedblossoms_.push_back(b);
        dualvar_.assign(2 * nv_, 0.0);
        for (int v = 0; v < nv_; ++v)
            dualvar_[v] = maxweight;
        allowedge_.assign(ne_, 0);
    }

    std::vector<int> solve(bool max_cardinality);

private:
    int endpoint(int p) const { return (p & 1) ? ej_[p >> 1] : ei_[p >> 1]; }
    double slack(int k) const { return dualvar_[ei_[k]] + dualvar_[ej_[k]] - 2.0 * w_[k]; }

    static int wrap(int j, std::size_t len) { return j < 0 ? j + static_cast<int>(len) : j; }

    void leaves(int b, std::vector<int>& out) const
    {
        if (b < nv_) {
            out.push_back(b);
            return;
        }
        for (int t : blossomchilds_[b])
            leaves(t, out);
    }
    std::vector<int> leaves(int b) const
    {
        std::vector<int> out;
        leaves(b, out);
        return out;
    }

    void assign_label(int w, int t, int p);
    int scan_blossom(int v, int w);
    void add_blossom(int base, int k);
    void expand_blossom(int b, bool endstage);
    void augment_blossom(int b, int v);
    void augment_matching(int k);

    int nv_;
    int ne_;
    std::vector<int> ei_, ej_;
    std::vector<double> w_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_;
    std::vector<std::vector<int>> blossomchilds_, blossomendps_, blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
};

void BlossomMatcher::assign_label(int w, int t, int p)
{
    for (;;) {
        int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            leaves(b, queue_);
            return;
        }
        // T-blossom: its base is matched, label the mate's blossom S.
        int base = blossombase_[b];
        int mp = mate_[base];
        w = endpoint(mp);
        t = 1;
        p = mp ^ 1;
    }
}

// Trace back from v and w to find a new blossom base, or -1 when the two
// S-vertices lie in different alternating trees (augmenting path found).
int BlossomMatcher::scan_blossom(int v, int w)
{
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
        int b = inblossom_[v];
        if (label_[b] & 4) {
            base = blossombase_[b];
            break;
        }
        path.push_back(b);
        label_[b] = 5;
        if (labelend_[b] == -1) {
            v = -1;
        } else {
            v = endpoint(labelend_[b]);
            b = inblossom_[v];
            v = endpoint(labelend_[b]);
        }
        if (w != -1)
            std::swap(v, w);
    }
    for (int b : path)
        label_[b] = 1;
    return base;
}

void BlossomMatcher::add_blossom(int base, int k)
{
    int v = ei_[k];
    int w = ej_[k];
    int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;

    std::vector<int> path;
    std::vector<int> endps;
    while (bv != bb) {
        blossomparent_[bv] = b;
        path.push_back(bv);
        endps.push_back(labelend_[bv]);
        v = endpoint(labelend_[bv]);
        bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
        blossomparent_[bw] = b;
        path.push_back(bw);
        endps.push_back(labelend_[bw] ^ 1);
        w = endpoint(labelend_[bw]);
        bw = inblossom_[w];
    }
    blossomchilds_[b] = path;
    blossomendps_[b] = endps;

    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0.0;
    for (int leaf : leaves(b)) {
        if (label_[inblossom_[leaf]] == 2)
            queue_.push_back(leaf);
        inblossom_[leaf] = b;
    }

    // Least-slack edges from the new blossom to each neighbouring S-blossom.
    std::vector<int> bestedgeto(2 * nv_, -1);
    auto consider = [&](int e) {
        int i = ei_[e];
        int j = ej_[e];
        if (inblossom_[j] == b)
            std::swap(i, j);
        int bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(e) < slack(bestedgeto[bj])))
            bestedgeto[bj] = e;
    };
    for (int sub : path) {
        if (!has_bestedges_[sub]) {
            for (int leaf : leaves(sub))
                for (int p : neighbend_[leaf])
                    consider(p / 2);
        } else {
            for (int e : blossombestedges_[sub])
                consider(e);
        }
        blossombestedges_[sub].clear();
        has_bestedges_[sub] = 0;
        bestedge_[sub] = -1;
    }
    blossombestedges_[b].clear();
    for (int e : bestedgeto)
        if (e != -1)
            blossombestedges_[b].push_back(e);
    has_bestedges_[b] = 1;
    bestedge_[b] = -1;
    for (int e : blossombestedges_[b])
        if (bestedge_[b] == -1 || slack(e) < slack(bestedge_[b]))
            bestedge_[b] = e;
}

void BlossomMatcher::expand_blossom(int b, bool endstage)
{
    for (int s : blossomchilds_[b]) {
        blossomparent_[s] = -1;
        if (s < nv_) {
            inblossom_[s] = s;
        } else if (endstage && dualvar_[s] == 0.0) {
            expand_blossom(s, endstage);
        } else {
            for (int leaf : leaves(s))
                inblossom_[leaf] = s;
        }
    }

    if (!endstage && label_[b] == 2) {
        // Relabel the sub-blossoms on the even-length path from the entry
        // child to the base; the rest become unlabeled or T via their mates.
        const auto& childs = blossomchilds_[b];
        const auto& endps = blossomendps_[b];
        const std::size_t len = childs.size();
        int entrychild = inblossom_[endpoint(labelend_[b] ^ 1)];
        int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
        int jstep;
        int endptrick;
        if (j & 1) {
            j -= static_cast<int>(len);
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        int p = labelend_[b];
        while (j != 0) {
            label_[endpoint(p ^ 1)] = 0;
            label_[endpoint(endps[wrap(j - endptrick, len)] ^ endptrick ^ 1)] = 0;
            assign_label(endpoint(p ^ 1), 2, p);
            allowedge_[endps[wrap(j - endptrick, len)] / 2] = 1;
            j += jstep;
            p = endps[wrap(j - endptrick, len)] ^ endptrick;
            allowedge_[p / 2] = 1;
            j += jstep;
        }
        int bv = childs[wrap(j, len)];
        label_[endpoint(p ^ 1)] = label_[bv] = 2;
        labelend_[endpoint(p ^ 1)] = labelend_[bv] = p;
        bestedge_[bv] = -1;
        j += jstep;
        while (childs[wrap(j, len)] != entrychild) {
            bv = childs[wrap(j, len)];
            if (label_[bv] == 1) {
                j += jstep;
                continue;
            }
            int labeled = -1;
            for (int leaf : leaves(bv)) {
                if (label_[leaf] != 0) {
                    labeled = leaf;
                    break;
                }
            }
            if (labeled != -1) {
                label_[labeled] = 0;
                label_[endpoint(mate_[blossombase_[bv]])] = 0;
                assign_label(labeled, 2, labelend_[labeled]);
            }
            j += jstep;
        }
    }

    label_[b] = labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = 0;
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
}

// Swap matched/unmatched edges along the even path from v to the base of b
// and rotate the child list so that v's sub-blossom becomes the base.
void BlossomMatcher::augment_blossom(int b, int v)
{
    int t = v;
    while (blossomparent_[t] != b)
        t = blossomparent_[t];
    if (t >= nv_)
        augment_blossom(t, v);

    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const std::size_t len = childs.size();
    int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    int j = i;
    int jstep;
    int endptrick;
    if (i & 1) {
        j -= static_cast<int>(len);
        jstep = 1;
        endptrick = 0;
    } else {
        jstep = -1;
        endptrick = 1;
    }
    while (j != 0) {
        j += jstep;
        t = childs[wrap(j, len)];
        int p = endps[wrap(j - endptrick, len)] ^ endptrick;
        if (t >= nv_)
            augment_blossom(t, endpoint(p));
        j += jstep;
        t = childs[wrap(j, len)];
        if (t >= nv_)
            augment_blossom(t, endpoint(p ^ 1));
        mate_[endpoint(p)] = p ^ 1;
        mate_[endpoint(p ^ 1)] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
}

void BlossomMatcher::augment_matching(int k)
{
    const int starts[2][2] = {{ei_[k], 2 * k + 1}, {ej_[k], 2 * k}};
    for (const auto& start : starts) {
        int s = start[0];
        int p = start[1];
        for (;;) {
            int bs = inblossom_[s];
            if (bs >= nv_)
                augment_blossom(bs, s);
            mate_[s] = p;
            if (labelend_[bs] == -1)
                break;
            int t = endpoint(labelend_[bs]);
            int bt = inblossom_[t];
            s = endpoint(labelend_[bt]);
            int j = endpoint(labelend_[bt] ^ 1);
            if (bt >= nv_)
                augment_blossom(bt, j);
            mate_[j] = labelend_[bt];
            p = labelend_[bt] ^ 1;
        }
    }
}

std::vector<int> BlossomMatcher::solve(bool max_cardinality)
{
    for (int stage = 0; stage < nv_; ++stage) {
        std::fill(label_.begin(), label_.end(), 0);
        std::fill(bestedge_.begin(), bestedge_.end(), -1);
        for (int b = nv_; b < 2 * nv_; ++b) {
            blossombestedges_[b].clear();
            has_bestedges_[b] = 0;
        }
        std::fill(allowedge_.begin(), allowedge_.end(), 0);
        queue_.clear();

        for (int v = 0; v < nv_; ++v)
            if (mate_[v] == -1 && label_[inblossom_[v]] == 0)
                assign_label(v, 1, -1);

        bool augmented = false;
        for (;;) {
            while (!queue_.empty() && !augmented) {
                int v = queue_.back();
                queue_.pop_back();
                for (int p : neighbend_[v]) {
                    int k = p / 2;
                    int w = endpoint(p);
                    if (inblossom_[v] == inblossom_[w])
                        continue;
                    double kslack = 0.0;
                    if (!allowedge_[k]) {
                        kslack = slack(k);
                        if (kslack <= 0.0)
                            allowedge_[k] = 1;
                    }
                    if (allowedge_[k]) {
                        if (label_[inblossom_[w]] == 0) {
                            assign_label(w, 2, p ^ 1);
                        } else if (label_[inblossom_[w]] == 1) {
                            int base = scan_blossom(v, w);
                            if (base >= 0) {
                                add_blossom(base, k);
                            } else {
                                augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if (label_[w] == 0) {
                            label_[w] = 2;
                            labelend_[w] = p ^ 1;
                        }
                    } else if (label_[inblossom_[w]] == 1) {
                        int b = inblossom_[v];
                        if (bestedge_[b] == -1 || kslack < slack(bestedge_[b]))
                            bestedge_[b] = k;
                    } else if (label_[w] == 0) {
                        if (bestedge_[w] == -1 || kslack < slack(bestedge_[w]))
                            bestedge_[w] = k;
                    }
                }
            }
            if (augmented)
                break;

            // No augmenting path under the current duals: pick the smallest
            // dual change that creates a new tight edge or empties a blossom.
            int deltatype = -1;
            double delta = 0.0;
            int deltaedge = -1;
            int deltablossom = -1;
            if (!max_cardinality) {
                deltatype = 1;
                delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + nv_);
            }
            for (int v = 0; v < nv_; ++v) {
                if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                    double d = slack(bestedge_[v]);
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 2;
                        deltaedge = bestedge_[v];
                    }
                }
            }
            for (int b = 0; b < 2 * nv_; ++b) {
                if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                    double d = slack(bestedge_[b]) / 2.0;
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 3;
                        deltaedge = bestedge_[b];
                    }
                }
            }
            for (int b = nv_; b < 2 * nv_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                    (deltatype == -1 || dualvar_[b] < delta)) {
                    delta = dualvar_[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if (deltatype == -1) {
                deltatype = 1;
                delta = std::max(0.0, *std::min_element(dualvar_.begin(), dualvar_.begin() + nv_));
            }

            for (int v = 0; v < nv_; ++v) {
                if (label_[inblossom_[v]] == 1)
                    dualvar_[v] -= delta;
                else if (label_[inblossom_[v]] == 2)
                    dualvar_[v] += delta;
            }
            for (int b = nv_; b < 2 * nv_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                    if (label_[b] == 1)
                        dualvar_[b] += delta;
                    else if (label_[b] == 2)
                        dualvar_[b] -= delta;
                }
            }

            if (deltatype == 1) {
                break;
            } else if (deltatype == 2) {
                allowedge_[deltaedge] = 1;
                int i = ei_[deltaedge];
                if (label_[inblossom_[i]] == 0)
                    i = ej_[deltaedge];
                queue_.push_back(i);
            } else if (deltatype == 3) {
                allowedge_[deltaedge] = 1;
                queue_.push_back(ei_[deltaedge]);
            } else {
                expand_blossom(deltablossom, false);
            }
        }

        if (!augmented)
            break;

        for (int b = nv_; b < 2 * nv_; ++b)
            if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0.0)
                expand_blossom(b, true);
    }

    std::vector<int> result(nv_, -1);
    for (int v = 0; v < nv_; ++v)
        if (mate_[v] >= 0)
            result[v] = endpoint(mate_[v]);
    return result;
}

} // namespace

Matching min_weight_perfect_matching(const DistanceMatrix& d)
{
    require_even(d, "min_weight_perfect_matching");
    const std::size_t n = d.size();

    double max_entry = 0.0;
    for (double x : d.entries())
        max_entry = std::max(max_entry, x);

    // Minimum-weight perfect = maximum weight of (max - d) among
    // maximum-cardinality matchings; the complete graph has a perfect one.
    const std::size_t ne = n * (n - 1) / 2;
    std::vector<int> ei;
    std::vector<int> ej;
    std::vector<double> w;
    ei.reserve(ne);
    ej.reserve(ne);
    w.reserve(ne);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            ei.push_back(static_cast<int>(i));
            ej.push_back(static_cast<int>(j));
            w.push_back(max_entry - d(i, j));
        }
    }

    BlossomMatcher matcher(static_cast<int>(n), std::move(ei), std::move(ej), std::move(w));
    std::vector<int> mate = matcher.solve(true);

    Matching result;
    for (std::size_t i = 0; i < n; ++i) {
        if (mate[i] < 0)
            throw std::logic_error("min_weight_perfect_matching: vertex left unmatched");
        auto j = static_cast<std::size_t>(mate[i]);
        if (i < j)
            result.pairs.emplace_back(i, j);
    }
    result.total_weight = matching_weight(d, result.pairs);
    return result;
}

namespace {

struct Enumerator {
    const DistanceMatrix& d;
    std::vector<char> used;
    std::vector<std::pair<std::size_t, std::size_t>> current;
    std::vector<std::pair<std::size_t, std::size_t>> best;
    double best_weight = std::numeric_limits<double>::infinity();

    void run(double partial)
    {
        std::size_t first = 0;
        while (first < used.size() && used[first])
            ++first;
        if (first == used.size()) {
            if (partial < best_weight) {
                best_weight = partial;
                best = current;
            }
            return;
        }
        used[first] = 1;
        for (std::size_t j = first + 1; j < used.size(); ++j) {
            if (used[j])
                continue;
            used[j] = 1;
            current.emplace_back(first, j);
            run(partial + d(first, j));
            current.pop_back();
            used[j] = 0;
        }
        used[first] = 0;
    }
};

} // namespace

Matching brute_force_matching(const DistanceMatrix& d)
{
    require_even(d, "brute_force_matching");
    if (d.size() > kBruteForceLimit)
        throw std::invalid_argument("brute_force_matching: refusing n = " + std::to_string(d.size()) +
                                    " (limit " + std::to_string(kBruteForceLimit) + ")");
    Enumerator e{d, std::vector<char>(d.size(), 0), {}, {}};
    e.run(0.0);
    Matching result;
    result.pairs = std::move(e.best);
    result.total_weight = matching_weight(d, result.pairs);
    return result;
}

} // namespace trajmatch
