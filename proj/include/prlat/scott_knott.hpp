#pragma once

#include <map>
#include <string>
#include <vector>

namespace prlat {

// Result of the effect-size-gated Scott-Knott ranking; rank 1 is best
// (highest mean). Groups partition the treatments.
struct SKGroups {
    struct Group {
        int rank = 1;
        std::vector<std::string> names;  // sorted for determinism
    };
    std::vector<Group> groups;

    int rank_of(const std::string& name) const;
};

// Recursive binary partitioning of treatments ordered by mean: the candidate
// split maximizes the between-group sum of squares over treatment means and
// is accepted only when Cohen's d between the two groups' pooled
// observations reaches d_threshold. Requires >= 2 treatments with
// equal-length observation lists.
SKGroups scott_knott_esd(const std::map<std::string, std::vector<double>>& treatments,
                         double d_threshold = 0.2);

}  // namespace prlat
