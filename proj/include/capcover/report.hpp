#pragma once

#include <cstdio>
#include <optional>
#include <string>

#include "capcover/instance.hpp"

namespace capcover {

// Everything a solve run reports. Timings are kept out of the canonical
// text so identical runs stay byte-identical; the CLI prints them to
// stderr instead.
struct RunReport {
    std::string instance_label;
    int n = 0, m = 0;
    std::string geometry;  // "euclid d=2" or "metric"
    std::string mode;
    double lp_value = 0.0;
    long long cost = 0;
    double max_beta = 1.0;
    double beta_bound = 0.0;
    double cost_bound = 0.0;
    std::optional<long long> opt;
    bool invariants_ok = true;
    double total_ms = 0.0;  // stderr only

    std::string text() const {
        std::string out;
        char buf[256];
        std::snprintf(buf, sizeof buf, "instance: %s n=%d m=%d geometry=%s\n",
                      instance_label.c_str(), n, m, geometry.c_str());
        out += buf;
        std::snprintf(buf, sizeof buf, "mode: %s\n", mode.c_str());
        out += buf;
        std::snprintf(buf, sizeof buf, "lp_value: %.9f\n", lp_value);
        out += buf;
        std::snprintf(buf, sizeof buf, "cost: %lld\n", cost);
        out += buf;
        std::snprintf(buf, sizeof buf, "max_beta: %.9f (bound %.4f)\n", max_beta, beta_bound);
        out += buf;
        if (lp_value > 0) {
            std::snprintf(buf, sizeof buf, "cost_over_lp: %.9f\n",
                          static_cast<double>(cost) / lp_value);
            out += buf;
        }
        if (opt) {
            std::snprintf(buf, sizeof buf, "opt: %lld cost_over_opt: %.9f\n", *opt,
                          static_cast<double>(cost) / static_cast<double>(*opt));
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "invariants: %s\n", invariants_ok ? "ok" : "VIOLATED");
        out += buf;
        return out;
    }
};

inline std::string geometry_label(const MetricInstance& inst) {
    if (inst.euclidean()) return "euclid d=" + std::to_string(inst.euclid().dim);
    return "metric";
}

}  // namespace capcover
