#include "spdeflow/run_config.hpp"

#include <chrono>
#include <fstream>

#include "spdeflow/basis.hpp"

namespace spdeflow::config {

nlohmann::json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

namespace {

Polynomial parse_poly_entry(const nlohmann::json& j, int d) {
    if (j.is_number()) return Polynomial::constant(d, j.get<double>());
    if (j.is_array()) {
        Polynomial p(d);
        for (const auto& term : j) {
            if (!term.is_array() || term.size() != 2)
                throw ConfigError("polynomial term must be [coef, [exponents...]]");
            const double c = term.at(0).get<double>();
            const auto e = term.at(1).get<std::vector<int>>();
            if (static_cast<int>(e.size()) != d) throw ConfigError("polynomial exponent arity mismatch");
            p.add_term(MultiIndex(e), c);
        }
        return p;
    }
    throw ConfigError("polynomial entry must be a number or a term list");
}

}  // namespace

CoefficientModel parse_model(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError("model: missing type");
    const std::string type = j.at("type").get<std::string>();
    const int d = j.value("d", 1);
    try {
        if (type == "brownian") return CoefficientModel::brownian(d);
        if (type == "ou") return CoefficientModel::ou(d);
        if (type == "constant") {
            const auto sj = j.at("sigma");
            const auto bj = j.at("b").get<std::vector<double>>();
            const int dd = static_cast<int>(bj.size());
            Eigen::MatrixXd sigma;
            if (sj.is_number()) {
                sigma = Eigen::MatrixXd::Identity(dd, dd) * sj.get<double>();
            } else {
                const auto rows = sj.get<std::vector<std::vector<double>>>();
                sigma.resize(static_cast<long>(rows.size()), static_cast<long>(rows.at(0).size()));
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (std::size_t k = 0; k < rows[i].size(); ++k)
                        sigma(static_cast<long>(i), static_cast<long>(k)) = rows[i][k];
            }
            Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bj.data(), static_cast<long>(bj.size()));
            return CoefficientModel::constant(sigma, b);
        }
        if (type == "polynomial") {
            const int r = j.value("r", d);
            const auto sj = j.at("sigma");
            const auto bj = j.at("b");
            std::vector<Polynomial> sigma, b;
            for (int i = 0; i < d; ++i)
                for (int al = 0; al < r; ++al) sigma.push_back(parse_poly_entry(sj.at(i).at(al), d));
            for (int i = 0; i < d; ++i) b.push_back(parse_poly_entry(bj.at(i), d));
            return CoefficientModel(d, r, std::move(sigma), std::move(b));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    throw ConfigError("model: unknown type '" + type + "'");
}

BasisPtr parse_basis(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("basis: object expected");
    try {
        const int d = j.value("d", 1);
        const int n_max = j.at("n_max").get<int>();
        const int quad = j.value("quad_nodes", 0);
        return Basis::make(d, n_max, quad);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("basis: ") + e.what());
    }
}

CompactDistribution parse_distribution(const nlohmann::json& j, int d) {
    try {
        return CompactDistribution::from_json(j, d);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("distribution: ") + e.what());
    }
}

SolverParams parse_solver(const nlohmann::json& j) {
    SolverParams p;
    if (j.is_null()) return p;
    try {
        p.T = j.value("T", p.T);
        p.dt = j.value("dt", p.dt);
        p.paths = j.value("paths", p.paths);
        if (j.contains("seed")) {
            p.seed = j.at("seed").get<std::uint64_t>();
            p.seed_given = true;
        }
        if (j.contains("p") && !j.at("p").is_null()) p.p = j.at("p").get<double>();
        if (j.contains("q") && !j.at("q").is_null()) p.q = j.at("q").get<double>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    if (!(p.T >= 0.0) || !(p.dt > 0.0) || p.paths < 1)
        throw ConfigError("solver: need T >= 0, dt > 0, paths >= 1");
    return p;
}

std::string config_hash(const nlohmann::json& j) {
    const std::string canon = nlohmann::json(j).dump();  // plain json sorts object keys
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

nlohmann::ordered_json make_report(const nlohmann::json& config,
                                   const nlohmann::ordered_json& result) {
    nlohmann::ordered_json rep;
    rep["schema"] = "spdeflow-report/1";
    rep["config"] = config;
    rep["config_hash"] = config_hash(config);
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    rep["metadata"] = {
        {"timestamp_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    rep["result"] = result;
    return rep;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace spdeflow::config
