#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphot/graph.hpp"

namespace graphot {

using json = nlohmann::json;

// Wire format: {"n_f": int, "n_c": int, "nodes": [[index,label],...],
// "edges": [[src,dst,label],...]}. Node indices must form [0, n).
inline json sparse_to_json(const SparseGraph& g) {
    json nodes = json::array();
    for (int i = 0; i < g.size(); ++i) nodes.push_back({i, g.labels[static_cast<std::size_t>(i)]});
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({e.src, e.dst, e.label});
    return json{{"n_f", g.n_f}, {"n_c", g.n_c}, {"nodes", nodes}, {"edges", edges}};
}

inline SparseGraph sparse_from_json(const json& j) {
    SparseGraph g;
    try {
        g.n_f = j.at("n_f").get<int>();
        g.n_c = j.at("n_c").get<int>();
        const auto& nodes = j.at("nodes");
        g.labels.assign(nodes.size(), 0);
        std::vector<char> seen(nodes.size(), 0);
        for (const auto& nd : nodes) {
            const int idx = nd.at(0).get<int>();
            if (idx < 0 || idx >= static_cast<int>(nodes.size()) || seen[static_cast<std::size_t>(idx)])
                throw std::invalid_argument("node indices must form a contiguous range");
            seen[static_cast<std::size_t>(idx)] = 1;
            g.labels[static_cast<std::size_t>(idx)] = nd.at(1).get<int>();
        }
        for (const auto& ed : j.at("edges")) {
            int s = ed.at(0).get<int>(), d = ed.at(1).get<int>();
            if (s > d) std::swap(s, d);
            g.edges.push_back({s, d, ed.at(2).get<int>()});
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad graph json: ") + e.what());
    }
    g.validate();
    return g;
}

// Dense graphs serialize as {"h": [...], "F": [[...]], "C": [[[...]]]} with C
// indexed [channel][i][j]. Used for real-valued fixtures and predictions.
inline json dense_to_json(const DenseGraph& d) {
    json h = json::array(), f = json::array(), c = json::array();
    for (int i = 0; i < d.size(); ++i) h.push_back(d.h(i));
    for (int i = 0; i < d.size(); ++i) {
        json row = json::array();
        for (int k = 0; k < d.node_dim(); ++k) row.push_back(d.F(i, k));
        f.push_back(row);
    }
    for (const auto& ch : d.C) {
        json m = json::array();
        for (int i = 0; i < d.size(); ++i) {
            json row = json::array();
            for (int k = 0; k < d.size(); ++k) row.push_back(ch(i, k));
            m.push_back(row);
        }
        c.push_back(m);
    }
    return json{{"h", h}, {"F", f}, {"C", c}};
}

inline DenseGraph dense_from_json(const json& j) {
    DenseGraph d;
    try {
        const auto& h = j.at("h");
        const int n = static_cast<int>(h.size());
        d.h = Vec(n);
        for (int i = 0; i < n; ++i) d.h(i) = h.at(static_cast<std::size_t>(i)).get<double>();
        const auto& f = j.at("F");
        const int df = f.empty() ? 0 : static_cast<int>(f.at(0).size());
        d.F = Mat(n, df);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < df; ++k) d.F(i, k) = f.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
        for (const auto& ch : j.at("C")) {
            Mat m(n, n);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) m(i, k) = ch.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
            d.C.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad dense graph json: ") + e.what());
    }
    return d;
}

inline Mat matrix_from_json(const json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(j.at(0).size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j.at(static_cast<std::size_t>(i)).size()) != cols)
            throw std::invalid_argument("matrix json: ragged rows");
        for (int k = 0; k < cols; ++k) m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    }
    return m;
}

inline json matrix_to_json(const Mat& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        out.push_back(row);
    }
    return out;
}

inline json vector_to_json(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline Vec vector_from_json(const json& j) {
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

// One JSON object per line.
inline void write_jsonl(const std::string& path, const std::vector<SparseGraph>& graphs) {
    std::ofstream fs(path);
    if (!fs) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& g : graphs) fs << sparse_to_json(g).dump() << '\n';
}

inline std::vector<SparseGraph> read_jsonl(const std::string& path) {
    std::ifstream fs(path);
    if (!fs) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<SparseGraph> out;
    std::string line;
    while (std::getline(fs, line)) {
        if (line.empty()) continue;
        out.push_back(sparse_from_json(json::parse(line)));
    }
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream fs(path);
    if (!fs) throw std::runtime_error("cannot open for reading: " + path);
    return json::parse(fs);
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream fs(path);
    if (!fs) throw std::runtime_error("cannot open for writing: " + path);
    fs << content;
}

}  // namespace graphot
