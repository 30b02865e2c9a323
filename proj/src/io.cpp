#include "circmodal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "circmodal/errors.hpp"

namespace circmodal {

namespace {

std::string at_line(const std::string& path, std::size_t line, const std::string& what) {
    return path + ":" + std::to_string(line) + ": " + what;
}

double parse_double(const std::string& path, std::size_t line, std::string_view token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw io_error(at_line(path, line, "malformed numeric field '" + std::string(token) + "'"));
    }
    return v;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

/// key=value pairs from a `#`-prefixed header line.
std::map<std::string, std::string> parse_header(const std::string& path, std::size_t line_no,
                                                const std::string& line) {
    std::map<std::string, std::string> out;
    for (std::string_view token : split_tokens(line)) {
        if (token == "#") continue;
        const auto eq = token.find('=');
        if (eq == std::string_view::npos) {
            throw io_error(at_line(path, line_no, "expected key=value in header"));
        }
        out[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
    }
    return out;
}

struct BandwidthKeys {
    const char* predictor;
    const char* response;
};

BandwidthKeys bandwidth_keys(Geometry g) {
    switch (g) {
        case Geometry::circ_lin: return {"kappa", "h"};
        case Geometry::lin_circ: return {"h", "kappa"};
        case Geometry::circ_circ: return {"nu", "kappa"};
    }
    return {"kappa", "h"};
}

bool outside_circle(double v) { return v <= -kPi || v > kPi; }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

LoadedSample read_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error(path + ": cannot open for reading");
    }
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw io_error(path + ": empty file");
    }
    ++line_no;
    if (line.empty() || line[0] != '#') {
        throw io_error(at_line(path, line_no, "expected '# geometry=<tag> n=<count>' header"));
    }
    const auto header = parse_header(path, line_no, line);
    const auto geo_it = header.find("geometry");
    const auto n_it = header.find("n");
    if (geo_it == header.end() || n_it == header.end()) {
        throw io_error(at_line(path, line_no, "header must carry geometry= and n="));
    }
    const auto geometry = parse_geometry(geo_it->second);
    if (!geometry) {
        throw io_error(at_line(path, line_no, "unknown geometry '" + geo_it->second + "'"));
    }
    const std::size_t n = static_cast<std::size_t>(parse_double(path, line_no, n_it->second));

    std::vector<double> predictors, responses;
    predictors.reserve(n);
    responses.reserve(n);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2) {
            throw io_error(at_line(path, line_no, "expected two numeric columns"));
        }
        predictors.push_back(parse_double(path, line_no, tokens[0]));
        responses.push_back(parse_double(path, line_no, tokens[1]));
    }
    if (predictors.size() != n) {
        throw io_error(path + ": header declares n=" + std::to_string(n) + " but " +
                       std::to_string(predictors.size()) + " rows were found");
    }

    std::size_t wrapped = 0;
    if (predictor_is_circular(*geometry)) {
        for (double v : predictors) {
            if (outside_circle(v)) ++wrapped;
        }
    }
    if (response_is_circular(*geometry)) {
        for (double v : responses) {
            if (outside_circle(v)) ++wrapped;
        }
    }
    return {RegressionSample(*geometry, std::move(predictors), std::move(responses)), wrapped};
}

void write_sample(const std::string& path, const RegressionSample& sample) {
    std::ofstream out(path);
    if (!out) {
        throw io_error(path + ": cannot open for writing");
    }
    out << "# geometry=" << geometry_name(sample.geometry) << " n=" << sample.size() << "\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out << format_double(sample.predictors[i]) << ' '
            << format_double(sample.responses[i]) << "\n";
    }
    if (!out) {
        throw io_error(path + ": write failed");
    }
}

void write_multifunction(const std::string& path, const ModalMultifunction& mf,
                         const Bandwidths* bandwidths, std::size_t n) {
    std::ofstream out(path);
    if (!out) {
        throw io_error(path + ": cannot open for writing");
    }
    out << "# geometry=" << geometry_name(mf.geometry) << " n=" << n;
    if (bandwidths) {
        const BandwidthKeys keys = bandwidth_keys(mf.geometry);
        out << ' ' << keys.predictor << '=' << format_double(bandwidths->predictor) << ' '
            << keys.response << '=' << format_double(bandwidths->response);
    }
    out << " mesh=" << mf.mesh.size() << "\n";
    out << "# columns: mesh_value mode_value density_value iterations\n";
    for (std::size_t i = 0; i < mf.mesh.size(); ++i) {
        const std::string mesh_value = format_double(mf.mesh[i]);
        if (mf.branches[i].empty()) {
            out << mesh_value << " nan nan 0\n";
            continue;
        }
        for (const Branch& b : mf.branches[i]) {
            out << mesh_value << ' ' << format_double(b.mode) << ' '
                << format_double(b.density) << ' ' << b.iterations << "\n";
        }
    }
    if (!out) {
        throw io_error(path + ": write failed");
    }
}

void write_multifunction_json(const std::string& path, const ModalMultifunction& mf,
                              const Bandwidths* bandwidths, std::size_t n) {
    nlohmann::json doc;
    doc["geometry"] = geometry_name(mf.geometry);
    doc["n"] = n;
    if (bandwidths) {
        const BandwidthKeys keys = bandwidth_keys(mf.geometry);
        doc["bandwidths"] = {{keys.predictor, bandwidths->predictor},
                             {keys.response, bandwidths->response}};
    }
    doc["mesh"] = mf.mesh;
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& row : mf.branches) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const Branch& b : row) {
            jrow.push_back({{"mode", b.mode},
                            {"density", b.density},
                            {"iterations", b.iterations}});
        }
        branches.push_back(std::move(jrow));
    }
    doc["branches"] = std::move(branches);
    std::ofstream out(path);
    if (!out) {
        throw io_error(path + ": cannot open for writing");
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw io_error(path + ": write failed");
    }
}

LoadedMultifunction read_multifunction(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error(path + ": cannot open for reading");
    }
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw io_error(path + ": empty file");
    }
    ++line_no;
    const auto header = parse_header(path, line_no, line);
    const auto geo_it = header.find("geometry");
    const auto n_it = header.find("n");
    const auto mesh_it = header.find("mesh");
    if (geo_it == header.end() || n_it == header.end() || mesh_it == header.end()) {
        throw io_error(at_line(path, line_no, "header must carry geometry=, n= and mesh="));
    }
    const auto geometry = parse_geometry(geo_it->second);
    if (!geometry) {
        throw io_error(at_line(path, line_no, "unknown geometry '" + geo_it->second + "'"));
    }

    LoadedMultifunction out;
    out.multifunction.geometry = *geometry;
    out.n = static_cast<std::size_t>(parse_double(path, line_no, n_it->second));
    const std::size_t mesh_count =
        static_cast<std::size_t>(parse_double(path, line_no, mesh_it->second));

    const BandwidthKeys keys = bandwidth_keys(*geometry);
    const auto pb = header.find(keys.predictor);
    const auto rb = header.find(keys.response);
    if (pb != header.end() && rb != header.end()) {
        out.bandwidths = Bandwidths(parse_double(path, line_no, pb->second),
                                    parse_double(path, line_no, rb->second));
    }

    auto& mf = out.multifunction;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 4) {
            throw io_error(at_line(path, line_no,
                                   "expected mesh_value mode_value density_value iterations"));
        }
        const double mesh_value = parse_double(path, line_no, tokens[0]);
        const double mode = parse_double(path, line_no, tokens[1]);
        const double density = parse_double(path, line_no, tokens[2]);
        const int iterations = static_cast<int>(parse_double(path, line_no, tokens[3]));
        if (mf.mesh.empty() || mf.mesh.back() != mesh_value) {
            mf.mesh.push_back(mesh_value);
            mf.branches.emplace_back();
        }
        if (!std::isnan(mode)) {
            mf.branches.back().push_back({mode, density, iterations});
        }
    }
    if (mf.mesh.size() != mesh_count) {
        throw io_error(path + ": header declares mesh=" + std::to_string(mesh_count) + " but " +
                       std::to_string(mf.mesh.size()) + " mesh points were found");
    }
    for (std::size_t i = 0; i < mf.branches.size(); ++i) {
        if (mf.branches[i].empty()) {
            mf.empty_points.push_back(i);
        }
    }
    return out;
}

SimModel read_sim_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error(path + ": cannot open for reading");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(path + ": invalid JSON: " + e.what());
    }

    const auto require = [&](const nlohmann::json& obj, const char* field) -> const nlohmann::json& {
        if (!obj.contains(field)) {
            throw io_error(path + ": model is missing field '" + field + "'");
        }
        return obj.at(field);
    };

    SimModel model;
    const auto geometry = parse_geometry(require(doc, "geometry").get<std::string>());
    if (!geometry) {
        throw io_error(path + ": field 'geometry' must be one of circ-lin, lin-circ, circ-circ");
    }
    model.geometry = *geometry;

    if (doc.contains("predictor")) {
        const auto& pred = doc.at("predictor");
        if (pred.contains("min")) model.predictor_lo = pred.at("min").get<double>();
        if (pred.contains("max")) model.predictor_hi = pred.at("max").get<double>();
    }

    for (const auto& jb : require(doc, "branches")) {
        BranchSpec branch;
        branch.weight = require(jb, "weight").get<double>();
        branch.dispersion = require(jb, "dispersion").get<double>();
        const auto& jc = require(jb, "curve");
        if (jc.contains("intercept")) branch.curve.intercept = jc.at("intercept").get<double>();
        if (jc.contains("harmonics")) {
            for (const auto& h : jc.at("harmonics")) {
                if (!h.is_array() || h.size() != 2) {
                    throw io_error(path + ": field 'harmonics' must hold [cos, sin] pairs");
                }
                branch.curve.harmonics.push_back({h[0].get<double>(), h[1].get<double>()});
            }
        }
        if (jc.contains("poly")) {
            for (const auto& c : jc.at("poly")) {
                branch.curve.poly.push_back(c.get<double>());
            }
        }
        model.branches.push_back(std::move(branch));
    }
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw io_error(path + ": " + e.what());
    }
    return model;
}

}  // namespace circmodal
