#include "reluforge/json_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace reluforge {

using nlohmann::json;

namespace {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::standard: return "standard";
        case Kind::connected: return "connected";
        case Kind::special: return "special";
    }
    return "standard";
}

Kind kind_from(const std::string& s) {
    if (s == "standard") return Kind::standard;
    if (s == "connected") return Kind::connected;
    if (s == "special") return Kind::special;
    throw std::invalid_argument("unknown network kind: " + s);
}

} // namespace

std::string network_to_json(const Network& net) {
    json j;
    j["kind"] = kind_name(net.kind);
    j["input_dim"] = net.input_dim;
    j["layers"] = json::array();
    for (const auto& L : net.layers) {
        json jl;
        auto rows = json::array();
        for (std::size_t r = 0; r < L.weights.rows; ++r) {
            auto row = json::array();
            for (std::size_t c = 0; c < L.weights.cols; ++c) row.push_back(L.weights(r, c));
            rows.push_back(std::move(row));
        }
        jl["weights"] = std::move(rows);
        jl["bias"] = L.bias;
        jl["activation"] = act_name(L.act.tag);
        if (L.act.tag == Act::leaky_relu || L.act.tag == Act::parametric_relu)
            jl["alpha"] = L.act.alpha;
        j["layers"].push_back(std::move(jl));
    }
    if (net.kind == Kind::special) {
        j["channel_meta"] = {{"source", net.channel_meta.source},
                             {"collation", net.channel_meta.collation}};
    }
    return j.dump(2);
}

Network network_from_json(const std::string& text) {
    json j = json::parse(text);
    Network net;
    net.kind = kind_from(j.at("kind").get<std::string>());
    net.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& jl : j.at("layers")) {
        LinearLayer L;
        const auto& rows = jl.at("weights");
        std::size_t nr = rows.size();
        std::size_t nc = nr ? rows[0].size() : 0;
        L.weights = Mat(nr, nc);
        for (std::size_t r = 0; r < nr; ++r) {
            if (rows[r].size() != nc)
                throw std::invalid_argument("ragged weight matrix in JSON");
            for (std::size_t c = 0; c < nc; ++c)
                L.weights(r, c) = rows[r][c].get<double>();
        }
        L.bias = jl.at("bias").get<Vec>();
        L.act.tag = act_from_name(jl.at("activation").get<std::string>());
        if (jl.contains("alpha")) L.act.alpha = jl["alpha"].get<double>();
        net.layers.push_back(std::move(L));
    }
    if (j.contains("channel_meta")) {
        net.channel_meta.source =
            j["channel_meta"].at("source").get<std::vector<std::size_t>>();
        net.channel_meta.collation =
            j["channel_meta"].at("collation").get<std::vector<std::size_t>>();
    }
    return net;
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << network_to_json(net) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

Network load_network(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return network_from_json(text);
}

} // namespace reluforge
