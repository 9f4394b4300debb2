#pragma once

#include <vector>

namespace capcover {

// Integral output of a rounding pipeline. expansion[i] is the realized
// serving factor of selected[i]: max over assigned points of d/r, with
// radius-zero balls reporting 1 when they serve only their own center.
struct RoundedSolution {
    std::vector<int> selected;
    std::vector<double> expansion;
    std::vector<int> assignment;  // point -> ball id
    long long cost = 0;
};

struct SoftSolution {
    std::vector<long long> copies;  // per ball id
    std::vector<int> assignment;
    long long total_copies = 0;
    double max_beta = 1.0;
};

}  // namespace capcover
