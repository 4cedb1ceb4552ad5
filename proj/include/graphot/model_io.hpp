#pragma once

#include <fstream>
#include <string>

#include "graphot/io.hpp"
#include "graphot/matcher.hpp"

namespace graphot {

inline json mlp_to_json(const Mlp& m) {
    return json{{"w1", matrix_to_json(m.w1)}, {"b1", vector_to_json(m.b1)},
                {"w2", matrix_to_json(m.w2)}, {"b2", vector_to_json(m.b2)}};
}

inline Mlp mlp_from_json(const json& j) {
    Mlp m;
    m.w1 = matrix_from_json(j.at("w1"));
    m.b1 = vector_from_json(j.at("b1"));
    m.w2 = matrix_from_json(j.at("w2"));
    m.b2 = vector_from_json(j.at("b2"));
    return m;
}

// Weight matrices are nested arrays in row-major order; the dims header
// records the layer shapes for consumers that only need sizes.
inline json model_to_json(const AffinityModel& m) {
    return json{{"dims",
                 {{"d_in", m.mlp_in.input_dim()},
                  {"hidden", m.mlp_in.hidden_dim()},
                  {"d_embed", m.mlp_in.output_dim()}}},
                {"mlp_in", mlp_to_json(m.mlp_in)},
                {"mlp_out", mlp_to_json(m.mlp_out)},
                {"u", vector_to_json(m.u)}};
}

inline AffinityModel model_from_json(const json& j) {
    AffinityModel m;
    try {
        m.mlp_in = mlp_from_json(j.at("mlp_in"));
        m.mlp_out = mlp_from_json(j.at("mlp_out"));
        m.u = vector_from_json(j.at("u"));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad model json: ") + e.what());
    }
    m.validate();
    return m;
}

inline void save_model(const std::string& path, const AffinityModel& m) {
    write_text_file(path, model_to_json(m).dump(2) + "\n");
}

inline AffinityModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace graphot
