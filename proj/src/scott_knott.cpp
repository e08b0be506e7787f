#include "prlat/scott_knott.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prlat/error.hpp"

namespace prlat {

namespace {

struct Treatment {
    std::string name;
    const std::vector<double>* obs;
    double mean;
};

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

struct SideStats {
    std::size_t n = 0;
    double mean = 0.0;
    double ss = 0.0;  // sum of squared deviations
};

SideStats pooled_observations(const std::vector<Treatment>& ts, std::size_t begin,
                              std::size_t end) {
    SideStats s;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        for (double v : *ts[i].obs) {
            sum += v;
            ++s.n;
        }
    }
    s.mean = sum / static_cast<double>(s.n);
    for (std::size_t i = begin; i < end; ++i) {
        for (double v : *ts[i].obs) s.ss += (v - s.mean) * (v - s.mean);
    }
    return s;
}

// Cohen's d with pooled sample standard deviation. Zero spread resolves to
// 0 for equal means and +inf otherwise; undefined (0 dof) resolves to 0 so
// singleton-vs-singleton observation sets never split.
double cohens_d(const SideStats& a, const SideStats& b) {
    const double diff = std::abs(a.mean - b.mean);
    if (a.n + b.n < 3) return 0.0;
    const double pooled_var =
        (a.ss + b.ss) / static_cast<double>(a.n + b.n - 2);
    if (pooled_var <= 0.0) {
        return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return diff / std::sqrt(pooled_var);
}

void partition(const std::vector<Treatment>& ts, std::size_t begin, std::size_t end,
               double d_threshold, std::vector<std::pair<std::size_t, std::size_t>>& out) {
    const std::size_t m = end - begin;
    if (m < 2) {
        out.emplace_back(begin, end);
        return;
    }
    // split maximizing between-group sum of squares over treatment means
    double grand = 0.0;
    for (std::size_t i = begin; i < end; ++i) grand += ts[i].mean;
    grand /= static_cast<double>(m);

    double best_bss = -1.0;
    std::size_t best_cut = begin + 1;
    double prefix = 0.0;
    for (std::size_t cut = begin + 1; cut < end; ++cut) {
        prefix += ts[cut - 1].mean;
        const double n1 = static_cast<double>(cut - begin);
        const double n2 = static_cast<double>(end - cut);
        const double m1 = prefix / n1;
        double suffix = grand * static_cast<double>(m) - prefix;
        const double m2 = suffix / n2;
        const double bss = n1 * (m1 - grand) * (m1 - grand) + n2 * (m2 - grand) * (m2 - grand);
        if (bss > best_bss + 1e-15) {
            best_bss = bss;
            best_cut = cut;
        }
    }

    const auto left = pooled_observations(ts, begin, best_cut);
    const auto right = pooled_observations(ts, best_cut, end);
    if (cohens_d(left, right) >= d_threshold) {
        partition(ts, begin, best_cut, d_threshold, out);
        partition(ts, best_cut, end, d_threshold, out);
    } else {
        out.emplace_back(begin, end);
    }
}

}  // namespace

int SKGroups::rank_of(const std::string& name) const {
    for (const auto& g : groups) {
        for (const auto& n : g.names) {
            if (n == name) return g.rank;
        }
    }
    raise(ErrorCode::Domain, "unknown treatment " + name);
}

SKGroups scott_knott_esd(const std::map<std::string, std::vector<double>>& treatments,
                         double d_threshold) {
    if (treatments.size() < 2) {
        raise(ErrorCode::Degenerate, "scott_knott_esd needs >= 2 treatments");
    }
    std::size_t len = 0;
    bool first = true;
    std::vector<Treatment> ts;
    ts.reserve(treatments.size());
    for (const auto& [name, obs] : treatments) {
        if (obs.empty()) raise(ErrorCode::Degenerate, "empty observations for " + name);
        if (first) {
            len = obs.size();
            first = false;
        } else if (obs.size() != len) {
            raise(ErrorCode::Domain, "observation lists must have equal length");
        }
        ts.push_back({name, &obs, mean_of(obs)});
    }
    std::sort(ts.begin(), ts.end(), [](const Treatment& a, const Treatment& b) {
        if (a.mean != b.mean) return a.mean > b.mean;
        return a.name < b.name;
    });

    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    partition(ts, 0, ts.size(), d_threshold, ranges);

    SKGroups result;
    int rank = 1;
    for (const auto& [begin, end] : ranges) {
        SKGroups::Group g;
        g.rank = rank++;
        for (std::size_t i = begin; i < end; ++i) g.names.push_back(ts[i].name);
        std::sort(g.names.begin(), g.names.end());
        result.groups.push_back(std::move(g));
    }
    return result;
}

}  // namespace prlat
