#include "oas/sweep_io.hpp"

#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oas/errors.hpp"
#include "oas/num_format.hpp"

namespace oas {

namespace {

std::string trim(std::string_view text) {
    std::size_t first = 0;
    std::size_t last = text.size();
    while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) --last;
    return std::string(text.substr(first, last - first));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        const std::size_t end = comma == std::string::npos ? value.size() : comma;
        items.push_back(trim(std::string_view(value).substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const int parsed = std::stoi(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const unsigned long long parsed = std::stoull(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse seed '" + value + "'");
    }
}

SourceKind parse_source_kind(const std::string& value) {
    if (value == "sparse-gaussian") return SourceKind::SparseGaussian;
    if (value == "binary") return SourceKind::Binary;
    throw ConfigError("config key 'source_kind': expected sparse-gaussian or binary, got '" +
                      value + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

// Single quotes double up inside gnuplot single-quoted strings.
std::string quote_gnuplot(const std::string& text) {
    std::string quoted;
    quoted.reserve(text.size() + 2);
    quoted.push_back('\'');
    for (const char ch : text) {
        quoted.push_back(ch);
        if (ch == '\'') quoted.push_back('\'');
    }
    quoted.push_back('\'');
    return quoted;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream lines(text);
    std::string raw;
    int line_number = 0;
    while (std::getline(lines, raw)) {
        ++line_number;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::size_t equals = line.find('=');
        if (equals == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key = value, got '" + line + "'");
        }
        const std::string key = trim(std::string_view(line).substr(0, equals));
        const std::string value = trim(std::string_view(line).substr(equals + 1));

        if (key == "source_kind") {
            config.source_kind = parse_source_kind(value);
        } else if (key == "p") {
            config.p = parse_double(key, value);
        } else if (key == "esn0_db") {
            config.esn0_db = parse_double(key, value);
        } else if (key == "n_components") {
            config.n_components = parse_int(key, value);
        } else if (key == "compression_ratios") {
            config.compression_ratios.clear();
            for (const std::string& item : split_list(value)) {
                config.compression_ratios.push_back(parse_double(key, item));
            }
        } else if (key == "oversampling_factors") {
            config.oversampling_factors.clear();
            for (const std::string& item : split_list(value)) {
                config.oversampling_factors.push_back(parse_int(key, item));
            }
        } else if (key == "policies") {
            config.policies.clear();
            for (const std::string& item : split_list(value)) {
                config.policies.push_back(parse_policy(item));
            }
        } else if (key == "trials") {
            config.trials = parse_int(key, value);
        } else if (key == "master_seed") {
            config.master_seed = parse_u64(key, value);
        } else if (key == "k_sensors") {
            config.k_sensors = parse_int(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "' on line " +
                              std::to_string(line_number));
        }
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw IoError("cannot open config file: " + path);
    probe.close();
    return parse_config_text(read_file(path));
}

std::string results_csv(const std::vector<CellResult>& cells) {
    if (cells.empty()) throw ConfigError("no sweep results to emit");
    std::string csv = "policy,c,M,mse,mse_db,stderr,slots_per_component,trials,seed,status\n";
    for (const CellResult& cell : cells) {
        csv += policy_name(cell.policy);
        csv += ',';
        csv += format_number(cell.compression_ratio);
        csv += ',';
        csv += std::to_string(cell.oversampling);
        csv += ',';
        if (cell.ok) {
            csv += format_number(cell.mse);
            csv += ',';
            csv += format_number(10.0 * std::log10(cell.mse));
            csv += ',';
            csv += format_number(cell.std_error);
            csv += ',';
            csv += format_number(cell.slots_per_component);
        } else {
            csv += ",,,";
        }
        csv += ',';
        csv += std::to_string(cell.trials);
        csv += ',';
        csv += std::to_string(cell.seed);
        csv += ',';
        csv += cell.ok ? "ok" : "skipped";
        csv += '\n';
    }
    return csv;
}

std::vector<OverlayPoint> load_overlay_csv(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream lines(text);
    std::string line;
    if (!std::getline(lines, line) || trim(line) != "compression_ratio,mse_db,label") {
        throw ConfigError("overlay file " + path +
                          ": first line must be 'compression_ratio,mse_db,label'");
    }
    std::vector<OverlayPoint> points;
    int line_number = 1;
    while (std::getline(lines, line)) {
        ++line_number;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const std::vector<std::string> fields = split_list(row);
        if (fields.size() != 3) {
            throw ConfigError("overlay file " + path + " line " +
                              std::to_string(line_number) + ": expected 3 fields, got " +
                              std::to_string(fields.size()));
        }
        points.push_back({parse_double("compression_ratio", fields[0]),
                          parse_double("mse_db", fields[1]), fields[2]});
    }
    return points;
}

std::string gnuplot_script(const std::string& csv_name, const std::vector<CellResult>& cells,
                           const std::vector<OverlayPoint>& overlay) {
    // One series per (policy, M) pair that produced at least one result.
    std::vector<std::pair<Policy, int>> series;
    for (const CellResult& cell : cells) {
        if (!cell.ok) continue;
        const std::pair<Policy, int> key{cell.policy, cell.oversampling};
        bool seen = false;
        for (const auto& existing : series) seen = seen || existing == key;
        if (!seen) series.push_back(key);
    }

    std::vector<std::string> labels;
    for (const OverlayPoint& point : overlay) {
        bool seen = false;
        for (const std::string& label : labels) seen = seen || label == point.label;
        if (!seen) labels.push_back(point.label);
    }

    std::string script;
    script += "# MSE vs compression ratio; expects the results CSV next to this script.\n";
    script += "set datafile separator ','\n";
    script += "set xlabel 'compression ratio c'\n";
    script += "set ylabel 'MSE [dB]'\n";
    script += "set grid\n";
    script += "set key bottom right\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        script += "$overlay_" + std::to_string(i) + " << EOD\n";
        for (const OverlayPoint& point : overlay) {
            if (point.label != labels[i]) continue;
            script += format_number(point.compression_ratio) + " " +
                      format_number(point.mse_db) + "\n";
        }
        script += "EOD\n";
    }

    std::vector<std::string> plots;
    for (const auto& [policy, oversampling] : series) {
        const std::string title = policy == Policy::Orthogonal
                                      ? std::string("orthogonal")
                                      : std::string(policy_name(policy)) + " M=" +
                                            std::to_string(oversampling);
        plots.push_back(quote_gnuplot(csv_name) + " using (strcol(1) eq '" +
                        policy_name(policy) + "' && strcol(3) eq '" +
                        std::to_string(oversampling) +
                        "' && strcol(10) eq 'ok' ? column(2) : NaN):5 with linespoints title " +
                        quote_gnuplot(title));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        plots.push_back("$overlay_" + std::to_string(i) +
                        " using 1:2 with points pointtype 6 title " +
                        quote_gnuplot(labels[i]));
    }
    if (!plots.empty()) {
        script += "plot \\\n  ";
        for (std::size_t i = 0; i < plots.size(); ++i) {
            if (i > 0) script += ", \\\n  ";
            script += plots[i];
        }
        script += "\n";
    }
    return script;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

} // namespace oas
