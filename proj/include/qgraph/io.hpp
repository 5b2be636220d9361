#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgraph/dispersion.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/optimize.hpp"
#include "qgraph/perturbation.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

using json = nlohmann::json;

/// Contents of a graph file: topology, a point of the closed simplex, and
/// the vertex conditions.
struct GraphFile {
    DiscreteGraph graph;
    LengthVector lengths;
    VertexConditionMap conditions;

    MetricGraph metric() const { return contract_zero_edges(graph, lengths, conditions); }
};

inline bool operator==(const GraphFile& a, const GraphFile& b) {
    if (a.graph.vertex_count() != b.graph.vertex_count() || a.graph.edge_count() != b.graph.edge_count()) return false;
    for (int e = 0; e < a.graph.edge_count(); ++e)
        if (a.graph.edge(e).u != b.graph.edge(e).u || a.graph.edge(e).v != b.graph.edge(e).v) return false;
    return a.lengths == b.lengths && a.conditions == b.conditions;
}

/// 12 significant digits, C locale.
inline std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline double round12(double x) { return std::isfinite(x) ? std::stod(fmt12(x)) : x; }

inline GraphFile graph_from_json(const json& j) {
    try {
        const int V = j.at("vertices").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw InvalidInputError("each edge must be a pair [u, v]");
            edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
        if (V < 1) throw InvalidInputError("graph needs at least one vertex");
        for (const Edge& e : edges)
            if (e.u < 0 || e.v < 0 || e.u >= V || e.v >= V) throw InvalidInputError("edge endpoint out of range");
        DiscreteGraph g(V, edges);
        LengthVector l = j.contains("lengths") ? LengthVector(j.at("lengths").get<std::vector<double>>())
                                               : LengthVector::equilateral(g.edge_count());
        if (l.size() != g.edge_count()) throw InvalidInputError("lengths must have one entry per edge");
        VertexConditionMap c(V, VertexCondition::neumann());
        if (j.contains("conditions")) {
            for (const auto& [key, val] : j.at("conditions").items()) {
                std::size_t pos = 0;
                const int v = std::stoi(key, &pos);
                if (pos != key.size() || v < 0 || v >= V) throw InvalidInputError("bad condition vertex '" + key + "'");
                if (val.is_string() && val == "neumann") c[v] = VertexCondition::neumann();
                else if (val.is_string() && val == "dirichlet") c[v] = VertexCondition::dirichlet();
                else if (val.is_object() && val.contains("delta_theta")) c[v] = VertexCondition::delta(val.at("delta_theta").get<double>());
                else throw InvalidInputError("unknown condition at vertex " + key);
            }
        }
        return {std::move(g), std::move(l), std::move(c)};
    } catch (const json::exception& e) {
        throw InvalidInputError(std::string("malformed graph JSON: ") + e.what());
    } catch (const std::logic_error& e) {
        throw InvalidInputError(std::string("malformed graph JSON: ") + e.what());
    }
}

/// Neumann vertices are left implicit; lengths keep full precision.
inline json to_json(const GraphFile& f) {
    json j;
    j["vertices"] = f.graph.vertex_count();
    j["edges"] = json::array();
    for (const Edge& e : f.graph.edges()) j["edges"].push_back({e.u, e.v});
    j["lengths"] = f.lengths.values();
    json c = json::object();
    for (int v = 0; v < f.graph.vertex_count(); ++v) {
        const auto& cond = f.conditions[v];
        if (cond.kind() == VertexCondition::Kind::dirichlet) c[std::to_string(v)] = "dirichlet";
        else if (cond.kind() == VertexCondition::Kind::delta) c[std::to_string(v)] = {{"delta_theta", cond.theta()}};
    }
    j["conditions"] = c;
    return j;
}

inline GraphFile parse_graph(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInputError(std::string("graph file is not valid JSON: ") + e.what());
    }
    return graph_from_json(j);
}

inline GraphFile load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_graph(ss.str());
}

inline void save_graph(const std::string& path, const GraphFile& f) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out << to_json(f).dump(2) << "\n";
}

// CSV.

inline std::string spectrum_csv(const Spectrum& s) {
    std::string r = "n,k,multiplicity\n";
    for (std::size_t n = 0; n < s.pairs.size(); ++n)
        r += std::to_string(n) + "," + fmt12(s.pairs[n].k) + "," + std::to_string(s.pairs[n].multiplicity) + "\n";
    return r;
}

/// Samples f at resolution + 1 points per edge.
inline std::string eigenfunction_csv(const MetricGraph& m, const TrigFunction& f, int resolution) {
    if (resolution < 1) throw InvalidInputError("resolution must be positive");
    std::string r = "edge,x,f\n";
    for (int e = 0; e < m.edge_count(); ++e)
        for (int i = 0; i <= resolution; ++i) {
            const double x = m.length(e) * i / resolution;
            r += std::to_string(e) + "," + fmt12(x) + "," + fmt12(f.value(e, x)) + "\n";
        }
    return r;
}

inline std::string dispersion_csv(const DispersionCurve& c) {
    std::string r = "theta";
    const std::size_t levels = c.levels.empty() ? 0 : c.levels[0].size();
    for (std::size_t n = 0; n < levels; ++n) r += ",k" + std::to_string(n);
    r += "\n";
    for (std::size_t j = 0; j < c.theta.size(); ++j) {
        r += fmt12(c.theta[j]);
        for (double k : c.levels[j]) r += "," + fmt12(k);
        r += "\n";
    }
    return r;
}

// JSON reports.

inline json round_all(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round12(x));
    return a;
}

inline json by_edge(const std::vector<double>& v) {
    json o = json::object();
    for (std::size_t e = 0; e < v.size(); ++e) o[std::to_string(e)] = round12(v[e]);
    return o;
}

inline json energies_json(const EnergyVector& en) {
    std::vector<double> grad = en.values;
    for (double& x : grad) x = -x;
    return {{"k", round12(en.k)}, {"energies", by_edge(en.values)}, {"gradient", by_edge(grad)}};
}

inline json to_json(const CriticalityReport& r) {
    return {{"critical", r.critical},
            {"k", round12(r.k)},
            {"spread", round12(r.spread)},
            {"energies", by_edge(r.energies)},
            {"odd_vertex_violations", r.odd_vertex_violations},
            {"even_vertex_violations", r.even_vertex_violations}};
}

inline json to_json(const OptimizationResult& r) {
    json trace = json::array();
    for (const auto& t : r.trace)
        trace.push_back({{"iteration", t.iteration}, {"gap", round12(t.gap)}, {"step", round12(t.step)}, {"move", t.move}});
    return {{"lengths", round_all(r.lengths)},
            {"gap", round12(r.gap)},
            {"multiplicity", r.multiplicity},
            {"classification", r.classification},
            {"trace", trace}};
}

inline json to_json(const SgpReport& r) {
    return {{"theta_sg", round12(r.theta_sg)},
            {"classification", to_string(r.classification)},
            {"gap", round12(r.gap)},
            {"neumann_multiplicity", r.neumann_multiplicity},
            {"dirichlet_multiplicity", r.dirichlet_multiplicity},
            {"gap_in_flat_band", r.gap_in_flat_band},
            {"residual", round12(r.residual)}};
}

inline json to_json(const GluingReport& r) {
    return {{"gap1", round12(r.gap1)},
            {"gap2", round12(r.gap2)},
            {"optimal_L", round12(r.optimal_L)},
            {"glued_gap", round12(r.glued_gap)},
            {"glued_multiplicity", r.glued_multiplicity},
            {"theta1", round12(r.sgp1.theta_sg)},
            {"theta2", round12(r.sgp2.theta_sg)},
            {"subadditive", r.subadditive},
            {"equality", r.equality},
            {"theta_condition", r.theta_condition},
            {"gaps_in_flat_bands", r.gaps_in_flat_bands},
            {"consistent", r.consistent}};
}

}  // namespace qgraph
