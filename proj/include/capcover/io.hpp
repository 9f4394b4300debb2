#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "capcover/core.hpp"
#include "capcover/instance.hpp"
#include "capcover/solution.hpp"

namespace capcover {

using nlohmann::json;

inline json instance_to_json(const MetricInstance& inst) {
    json j;
    if (inst.euclidean()) {
        const auto& g = inst.euclid();
        j["dimension"] = g.dim;
        j["points"] = g.points;
        j["centers"] = g.centers;
    } else {
        const auto& g = inst.metric();
        j["dimension"] = nullptr;
        j["points"] = g.point_names;
        j["centers"] = g.center_names;
        const int nn = inst.num_nodes();
        json rows = json::array();
        for (int a = 0; a < nn; ++a) {
            json row = json::array();
            for (int b = 0; b < nn; ++b) row.push_back(g.dist[static_cast<size_t>(a) * nn + b]);
            rows.push_back(std::move(row));
        }
        j["metric"] = std::move(rows);
    }
    json balls = json::array();
    for (const auto& b : inst.balls)
        balls.push_back({{"center_index", b.center}, {"radius", b.radius}, {"capacity", b.capacity}});
    j["balls"] = std::move(balls);
    return j;
}

inline MetricInstance instance_from_json(const json& j) {
    MetricInstance inst;
    try {
        if (!j.contains("dimension") || !j.contains("points") || !j.contains("centers") ||
            !j.contains("balls"))
            throw input_error("instance file misses a required field");
        if (j["dimension"].is_null()) {
            ExplicitGeometry g;
            g.point_names = j["points"].get<std::vector<std::string>>();
            g.center_names = j["centers"].get<std::vector<std::string>>();
            auto rows = j.at("metric").get<std::vector<std::vector<double>>>();
            const size_t nn = g.point_names.size() + g.center_names.size();
            if (rows.size() != nn) throw input_error("metric matrix has wrong row count");
            g.dist.reserve(nn * nn);
            for (const auto& row : rows) {
                if (row.size() != nn) throw input_error("metric matrix has ragged rows");
                for (double v : row) g.dist.push_back(v);
            }
            inst.geometry = std::move(g);
        } else {
            EuclideanGeometry g;
            g.dim = j["dimension"].get<int>();
            g.points = j["points"].get<std::vector<std::vector<double>>>();
            g.centers = j["centers"].get<std::vector<std::vector<double>>>();
            inst.geometry = std::move(g);
        }
        for (const auto& jb : j["balls"]) {
            Ball b;
            b.center = jb.at("center_index").get<int>();
            b.radius = jb.at("radius").get<double>();
            b.capacity = jb.at("capacity").get<long long>();
            inst.balls.push_back(b);
        }
    } catch (const json::exception& e) {
        throw input_error(std::string("instance parse: ") + e.what());
    }
    return inst;
}

struct SolutionFile {
    RoundedSolution rounded;
    double lp_value = 0.0;
    std::optional<std::vector<long long>> copies;  // soft mode
};

inline json solution_to_json(const SolutionFile& s) {
    json j;
    j["selected"] = s.rounded.selected;
    j["assignment"] = s.rounded.assignment;
    j["expansion"] = s.rounded.expansion;
    j["cost"] = s.rounded.cost;
    j["lp_value"] = s.lp_value;
    if (s.copies) j["copies"] = *s.copies;
    return j;
}

inline SolutionFile solution_from_json(const json& j) {
    SolutionFile s;
    try {
        s.rounded.selected = j.at("selected").get<std::vector<int>>();
        s.rounded.assignment = j.at("assignment").get<std::vector<int>>();
        s.rounded.expansion = j.at("expansion").get<std::vector<double>>();
        s.rounded.cost = j.at("cost").get<long long>();
        s.lp_value = j.at("lp_value").get<double>();
        if (j.contains("copies")) s.copies = j["copies"].get<std::vector<long long>>();
    } catch (const json::exception& e) {
        throw input_error(std::string("solution parse: ") + e.what());
    }
    return s;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << content;
}

inline MetricInstance load_instance(const std::string& path) {
    try {
        return instance_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw input_error(std::string("instance parse: ") + e.what());
    }
}

inline SolutionFile load_solution(const std::string& path) {
    try {
        return solution_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw input_error(std::string("solution parse: ") + e.what());
    }
}

}  // namespace capcover
