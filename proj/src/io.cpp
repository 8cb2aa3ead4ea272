#include "dpinfer/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dpinfer {

namespace {

using nlohmann::json;

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    return in;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write " + path);
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

json parse_json(std::istream& in, const std::string& what) {
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
    return parsed;
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw ParseError(context + ": expected a number, got \"" + text + "\"");
    }
    return value;
}

CountCube load_cube_file(const std::string& path) {
    std::ifstream in = open_for_read(path);
    try {
        return load_cube(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

QuerySpec load_query(std::istream& in) {
    const json parsed = parse_json(in, "query file");
    if (!parsed.is_object() || !parsed.contains("coefficients")) {
        throw ParseError("query file: expected an object with \"coefficients\"");
    }
    if (parsed.contains("constant") || parsed.contains("offset")) {
        throw ParseError(
            "query file: additive constants are not part of a linear counting "
            "query; they change neither the sensitivity nor the private "
            "answer, so drop the \"constant\" entry");
    }
    const json& coefficients = parsed["coefficients"];
    if (!coefficients.is_array() || coefficients.empty()) {
        throw ParseError("query file: \"coefficients\" must be a nonempty array");
    }
    std::vector<double> values;
    values.reserve(coefficients.size());
    for (const json& c : coefficients) {
        if (!c.is_number()) {
            throw ParseError("query file: coefficients must be numbers");
        }
        values.push_back(c.get<double>());
    }

    QuerySpec spec{LinearQuery(std::move(values)), std::nullopt};
    const bool has_eps = parsed.contains("epsilon");
    const bool has_delta = parsed.contains("delta");
    if (has_eps != has_delta) {
        throw ParseError("query file: epsilon and delta come as a pair");
    }
    if (has_eps) {
        spec.requirement.emplace(parsed["epsilon"].get<double>(),
                                 parsed["delta"].get<double>());
    }
    return spec;
}

QuerySpec load_query_file(const std::string& path) {
    std::ifstream in = open_for_read(path);
    try {
        return load_query(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_history(std::ostream& out, const QueryHistory& history) {
    out << "alpha,sensitivity,y";
    for (std::size_t j = 0; j < history.dimension(); ++j) {
        out << ",q_" << j;
    }
    out << '\n';
    for (const HistoryRow& row : history.rows()) {
        out << format_double(row.alpha) << ','
            << format_double(row.sensitivity) << ','
            << format_double(row.noisy_answer);
        for (double c : row.query.coefficients()) {
            out << ',' << format_double(c);
        }
        out << '\n';
    }
}

QueryHistory load_history(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("history file is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "alpha" ||
        header[1] != "sensitivity" || header[2] != "y") {
        throw ParseError(
            "history header must be alpha,sensitivity,y,q_0,...");
    }
    const std::size_t n = header.size() - 3;
    for (std::size_t j = 0; j < n; ++j) {
        if (header[3 + j] != "q_" + std::to_string(j)) {
            throw ParseError("history header column " + std::to_string(3 + j) +
                             " should be q_" + std::to_string(j));
        }
    }

    QueryHistory history;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        const std::string where = "history line " + std::to_string(line_number);
        if (fields.size() != 3 + n) {
            throw ParseError(where + ": expected " + std::to_string(3 + n) +
                             " fields, got " + std::to_string(fields.size()));
        }
        const double alpha = parse_double(fields[0], where);
        const double sensitivity = parse_double(fields[1], where);
        const double answer = parse_double(fields[2], where);
        std::vector<double> coefficients(n);
        for (std::size_t j = 0; j < n; ++j) {
            coefficients[j] = parse_double(fields[3 + j], where);
        }
        try {
            history.append(
                {LinearQuery(std::move(coefficients)), answer, alpha, sensitivity});
        } catch (const Error& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (history.empty()) {
        throw ParseError("history file has no rows");
    }
    return history;
}

void save_history_file(const std::string& path, const QueryHistory& history) {
    std::ofstream out = open_for_write(path);
    save_history(out, history);
}

QueryHistory load_history_file(const std::string& path) {
    std::ifstream in = open_for_read(path);
    try {
        return load_history(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_pmv(std::ostream& out, const ProbabilityMassVector& pmv) {
    out << "offset,mass\n";
    for (int o = pmv.min_offset(); o <= pmv.max_offset(); ++o) {
        out << o << ',' << format_double(pmv.at_offset(o)) << '\n';
    }
}

ProbabilityMassVector load_pmv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) !=
                                       std::vector<std::string>{"offset", "mass"}) {
        throw ParseError("mass vector header must be offset,mass");
    }
    std::vector<double> masses;
    std::size_t line_number = 1;
    long expected_offset = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        const std::string where = "mass vector line " + std::to_string(line_number);
        if (fields.size() != 2) {
            throw ParseError(where + ": expected offset,mass");
        }
        const long offset = std::lround(parse_double(fields[0], where));
        if (first) {
            expected_offset = offset;
            first = false;
        }
        if (offset != expected_offset) {
            throw ParseError(where + ": offsets must ascend by 1");
        }
        ++expected_offset;
        masses.push_back(parse_double(fields[1], where));
    }
    if (masses.empty()) {
        throw ParseError("mass vector file has no bins");
    }
    const long last_offset = expected_offset - 1;
    const long first_offset = last_offset - static_cast<long>(masses.size()) + 1;
    if (first_offset != -last_offset) {
        throw ParseError("mass vector offsets must be symmetric about 0");
    }
    try {
        return ProbabilityMassVector(std::move(masses));
    } catch (const Error& e) {
        throw ParseError(std::string("mass vector: ") + e.what());
    }
}

void save_pmv_file(const std::string& path, const ProbabilityMassVector& pmv) {
    std::ofstream out = open_for_write(path);
    save_pmv(out, pmv);
}

ProbabilityMassVector load_pmv_file(const std::string& path) {
    std::ifstream in = open_for_read(path);
    try {
        return load_pmv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_posterior(const std::string& csv_path, const Posterior& posterior,
                    const InferenceConfig& config) {
    save_pmv_file(csv_path, posterior.mass);
    json sidecar;
    sidecar["center"] = posterior.center_value;
    sidecar["method"] = posterior.method == PosteriorMethod::monte_carlo
                            ? "mc"
                            : "pc";
    sidecar["loss"] = posterior.loss;
    if (posterior.method == PosteriorMethod::monte_carlo) {
        sidecar["samples"] = config.sample_size;
    } else {
        sidecar["gamma"] = config.gamma;
    }
    std::ofstream out = open_for_write(csv_path + ".json");
    out << sidecar.dump(2) << '\n';
}

namespace {

const char* served_from_label(ServedFrom served) {
    switch (served) {
        case ServedFrom::history_inference: return "history_inference";
        case ServedFrom::fresh_mechanism: return "fresh_mechanism";
        case ServedFrom::rejected: return "rejected";
    }
    return "unknown";
}

}  // namespace

void save_run_log(std::ostream& out, const std::vector<RunRecord>& log) {
    out << "qid,served_from,alpha_spent,estimate,L,U,epsilon,delta,true_theta\n";
    for (const RunRecord& r : log) {
        out << r.qid << ',' << served_from_label(r.served_from) << ','
            << format_double(r.alpha_spent) << ',' << format_double(r.estimate)
            << ',' << format_double(r.lower) << ',' << format_double(r.upper)
            << ',' << format_double(r.epsilon) << ',' << format_double(r.delta)
            << ',' << format_double(r.true_theta) << '\n';
    }
}

void save_run_log_file(const std::string& path,
                       const std::vector<RunRecord>& log) {
    std::ofstream out = open_for_write(path);
    save_run_log(out, log);
}

ExperimentConfig load_experiment_config(std::istream& in) {
    const json parsed = parse_json(in, "config file");
    if (!parsed.is_object()) {
        throw ParseError("config file: expected a JSON object");
    }
    ExperimentConfig config;
    for (const auto& [key, value] : parsed.items()) {
        if (key == "n") {
            config.n = value.get<std::size_t>();
        } else if (key == "queries") {
            config.queries = value.get<std::size_t>();
        } else if (key == "seed") {
            config.seed = value.get<std::uint64_t>();
        } else if (key == "bound") {
            config.bound = value.get<double>();
        } else if (key == "epsilon_range") {
            if (!value.is_array() || value.size() != 2) {
                throw ParseError("config: epsilon_range must be [low, high]");
            }
            config.epsilon_range = {value[0].get<double>(),
                                    value[1].get<double>()};
        } else if (key == "delta") {
            config.delta = value.get<double>();
        } else if (key == "method") {
            const std::string method = value.get<std::string>();
            if (method == "mc") {
                config.method = PosteriorMethod::monte_carlo;
            } else if (method == "pc") {
                config.method = PosteriorMethod::probability_calculation;
            } else {
                throw ParseError("config: method must be \"mc\" or \"pc\"");
            }
        } else if (key == "gamma") {
            config.gamma = value.get<double>();
        } else if (key == "bootstrap_alpha") {
            config.bootstrap_alpha = value.get<double>();
        } else if (key == "ols") {
            config.ols = value.get<bool>();
        } else if (key == "out_dir") {
            config.out_dir = value.get<std::string>();
        } else {
            throw ParseError("config: unknown key \"" + key + "\"");
        }
    }
    if (config.epsilon_range.first <= 0.0 ||
        config.epsilon_range.second < config.epsilon_range.first) {
        throw ParseError("config: epsilon_range must be positive and ordered");
    }
    return config;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
    std::ifstream in = open_for_read(path);
    try {
        return load_experiment_config(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace dpinfer
