#pragma once

// File formats. Numbers are written with 17 significant digits so that a
// write/read cycle reproduces every double exactly. All writes go through a
// temporary file and a rename, so readers never observe partial output.
//
//   draws      header = unit ids; one row per posterior draw
//   counts     unit,y,E
//   dataset    unit,theta,y,E
//   estimates  unit,<rule label>,...
//   adjacency  "i: j k ..." per line, 1-based; '#' starts a comment
//   reports    loss,rule,optimal_loss,candidate_loss,regret,percent_regret (+ JSON mirror)

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ed/ensemble_core.hpp"
#include "ed/estimators.hpp"
#include "ed/graph.hpp"
#include "ed/loss_report.hpp"
#include "ed/simulation.hpp"

namespace ed::io {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::validation, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) fail(ErrorKind::validation, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        fail(ErrorKind::validation, "cannot replace " + path.string() + ": " + ec.message());
    }
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::validation, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ------------------------------------------------------------------- CSV

struct CsvField {
    std::string_view text;
    std::size_t column;  // 1-based character position
};

struct CsvRow {
    std::size_t line;  // 1-based
    std::vector<CsvField> fields;
};

[[noreturn]] inline void parse_fail(const std::string& where, std::size_t line, std::size_t col,
                                    const std::string& msg) {
    fail(ErrorKind::parse,
         where + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

/// Splits text into comma-separated rows. Blank lines are skipped and
/// fields are trimmed of surrounding spaces. No quoting.
inline std::vector<CsvRow> split_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) {
            CsvRow row{line_no, {}};
            std::size_t start = 0;
            while (true) {
                auto comma = line.find(',', start);
                auto field = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                 : comma - start);
                std::size_t lead = 0;
                while (lead < field.size() && (field[lead] == ' ' || field[lead] == '\t')) ++lead;
                field.remove_prefix(lead);
                while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
                    field.remove_suffix(1);
                }
                row.fields.push_back({field, start + lead + 1});
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            rows.push_back(std::move(row));
        }
        if (end == text.size()) break;
        pos = end + 1;
    }
    return rows;
}

inline double parse_number(const CsvField& f, std::size_t line, const std::string& where) {
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (f.text.empty() || ec != std::errc() || ptr != last) {
        parse_fail(where, line, f.column, "not a number: '" + std::string(f.text) + "'");
    }
    if (!std::isfinite(v)) {
        parse_fail(where, line, f.column, "non-finite value: '" + std::string(f.text) + "'");
    }
    return v;
}

/// A CSV with a header row and numeric body; optionally the first column
/// holds string ids.
struct Table {
    std::vector<std::string> header;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column_index(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        fail(ErrorKind::validation, "missing column '" + name + "'");
    }
    /// Numeric column by header name (the id column excluded).
    [[nodiscard]] std::vector<double> column(const std::string& name, bool has_ids) const {
        const auto j = column_index(name);
        require(!(has_ids && j == 0), ErrorKind::validation, "column '" + name + "' holds ids");
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[j - (has_ids ? 1 : 0)]);
        return out;
    }
};

inline Table parse_table(std::string_view text, bool has_ids, const std::string& where) {
    const auto rows = split_csv(text);
    if (rows.empty()) fail(ErrorKind::parse, where + ": empty file");
    Table t;
    for (const auto& f : rows[0].fields) {
        if (f.text.empty()) parse_fail(where, rows[0].line, f.column, "empty header field");
        t.header.emplace_back(f.text);
    }
    const std::size_t width = t.header.size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != width) {
            const auto col = row.fields.size() > width ? row.fields[width].column
                                                       : row.fields.back().column;
            parse_fail(where, row.line, col,
                       "ragged row: expected " + std::to_string(width) + " fields, found " +
                           std::to_string(row.fields.size()));
        }
        std::vector<double> values;
        for (std::size_t j = 0; j < width; ++j) {
            if (has_ids && j == 0) {
                t.ids.emplace_back(row.fields[0].text);
            } else {
                values.push_back(parse_number(row.fields[j], row.line, where));
            }
        }
        t.rows.push_back(std::move(values));
    }
    return t;
}

inline Table read_table(const std::filesystem::path& path, bool has_ids) {
    return parse_table(read_text(path), has_ids, path.string());
}

// ----------------------------------------------------------------- draws

inline std::string format_draws(const PosteriorDrawMatrix& m) {
    std::string out;
    const auto& ids = m.unit_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
    out += '\n';
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto row = m.row(s);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline PosteriorDrawMatrix parse_draws(std::string_view text, const std::string& where) {
    auto t = parse_table(text, false, where);
    if (t.rows.empty()) fail(ErrorKind::parse, where + ": no draw rows");
    std::vector<double> values;
    values.reserve(t.rows.size() * t.header.size());
    for (const auto& r : t.rows) values.insert(values.end(), r.begin(), r.end());
    return {t.rows.size(), t.header.size(), std::move(values), std::move(t.header)};
}

inline void write_draws(const std::filesystem::path& path, const PosteriorDrawMatrix& m) {
    write_text_atomic(path, format_draws(m));
}

inline PosteriorDrawMatrix read_draws(const std::filesystem::path& path) {
    return parse_draws(read_text(path), path.string());
}

// ------------------------------------------------------ counts / datasets

struct CountsData {
    std::vector<std::string> ids;
    std::vector<double> y;
    std::vector<double> E;
};

inline std::vector<std::string> default_ids(std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "u" + std::to_string(i + 1);
    return ids;
}

inline void write_counts(const std::filesystem::path& path, const CountsData& c) {
    std::string out = "unit,y,E\n";
    for (std::size_t i = 0; i < c.y.size(); ++i) {
        out += c.ids[i] + "," + format_double(c.y[i]) + "," + format_double(c.E[i]) + "\n";
    }
    write_text_atomic(path, out);
}

inline CountsData read_counts(const std::filesystem::path& path) {
    const auto t = read_table(path, true);
    return {t.ids, t.column("y", true), t.column("E", true)};
}

inline void write_dataset(const std::filesystem::path& path, const SimulatedDataset& d,
                          const std::vector<std::string>& ids) {
    std::string out = "unit,theta,y,E\n";
    for (std::size_t i = 0; i < d.theta.size(); ++i) {
        out += ids[i] + "," + format_double(d.theta[i]) + "," + format_double(d.y[i]) + "," +
               format_double(d.E[i]) + "\n";
    }
    write_text_atomic(path, out);
}

struct DatasetFile {
    std::vector<std::string> ids;
    SimulatedDataset data;
};

inline DatasetFile read_dataset(const std::filesystem::path& path) {
    const auto t = read_table(path, true);
    DatasetFile f;
    f.ids = t.ids;
    f.data.theta = t.column("theta", true);
    f.data.y = t.column("y", true);
    f.data.E = t.column("E", true);
    return f;
}

// -------------------------------------------------------------- estimates

inline void write_estimates(const std::filesystem::path& path, const std::vector<std::string>& ids,
                            const std::vector<EnsembleEstimate>& est) {
    std::string out = "unit";
    for (const auto& e : est) {
        require(e.values.size() == ids.size(), ErrorKind::dimension,
                "estimate length does not match unit ids");
        out += "," + e.rule.label();
    }
    out += '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i];
        for (const auto& e : est) out += "," + format_double(e.values[i]);
        out += '\n';
    }
    write_text_atomic(path, out);
}

/// Columns of an estimates file keyed by header label.
inline std::map<std::string, std::vector<double>> read_estimates(const std::filesystem::path& path,
                                                                 std::vector<std::string>* ids = nullptr) {
    const auto t = read_table(path, true);
    std::map<std::string, std::vector<double>> out;
    for (std::size_t j = 1; j < t.header.size(); ++j) out[t.header[j]] = t.column(t.header[j], true);
    if (ids) *ids = t.ids;
    return out;
}

// -------------------------------------------------------------- adjacency

inline AdjacencyGraph parse_adjacency(std::string_view text, const std::string& where) {
    std::map<std::size_t, std::vector<std::size_t>> lists;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::size_t max_index = 0;
    auto parse_index = [&](std::string_view tok, std::size_t col) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0) {
            parse_fail(where, line_no, col, "bad area index '" + std::string(tok) + "'");
        }
        max_index = std::max(max_index, v);
        return v;
    };
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) {
            const auto colon = line.find(':');
            if (colon == std::string_view::npos) {
                parse_fail(where, line_no, 1, "expected 'index: neighbours'");
            }
            auto head = line.substr(0, colon);
            const auto lead = head.find_first_not_of(" \t");
            head = head.substr(lead, head.find_last_not_of(" \t") - lead + 1);
            const auto node = parse_index(head, lead + 1);
            if (lists.count(node)) parse_fail(where, line_no, 1, "area listed twice");
            auto& nb = lists[node];
            std::size_t i = colon + 1;
            while (i < line.size()) {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
                if (i >= line.size()) break;
                std::size_t j = i;
                while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
                nb.push_back(parse_index(line.substr(i, j - i), i + 1) - 1);
                i = j;
            }
        }
        if (end == text.size()) break;
        pos = end + 1;
    }
    if (lists.empty()) fail(ErrorKind::parse, where + ": no adjacency lines");
    std::vector<std::vector<std::size_t>> nb(max_index);
    for (std::size_t i = 1; i <= max_index; ++i) {
        auto it = lists.find(i);
        if (it == lists.end()) {
            fail(ErrorKind::parse, where + ": area " + std::to_string(i) + " has no line");
        }
        nb[i - 1] = std::move(it->second);
    }
    return AdjacencyGraph(std::move(nb));
}

inline AdjacencyGraph read_adjacency(const std::filesystem::path& path) {
    return parse_adjacency(read_text(path), path.string());
}

inline std::string format_adjacency(const AdjacencyGraph& g) {
    std::string out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        out += std::to_string(i + 1) + ":";
        for (auto j : g.neighbors(i)) out += " " + std::to_string(j + 1);
        out += '\n';
    }
    return out;
}

inline void write_adjacency(const std::filesystem::path& path, const AdjacencyGraph& g) {
    write_text_atomic(path, format_adjacency(g));
}

// ---------------------------------------------------------------- reports

inline std::string format_reports_csv(const std::vector<LossReport>& reports) {
    std::string out = "loss,rule,optimal_loss,candidate_loss,regret,percent_regret\n";
    for (const auto& r : reports) {
        out += r.loss_name + "," + r.rule + "," + format_double(r.optimal_loss) + "," +
               format_double(r.candidate_loss) + "," + format_double(r.regret) + "," +
               format_double(r.percent_regret) + "\n";
    }
    return out;
}

inline nlohmann::json reports_json(const std::vector<LossReport>& reports) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return format_double(v);  // "inf" survives as a string
    };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"loss", r.loss_name},
                       {"rule", r.rule},
                       {"optimal_loss", num(r.optimal_loss)},
                       {"candidate_loss", num(r.candidate_loss)},
                       {"regret", num(r.regret)},
                       {"percent_regret", num(r.percent_regret)}});
    }
    return arr;
}

/// Writes `<stem>.csv` and its JSON mirror `<stem>.json`.
inline void write_reports(const std::filesystem::path& csv_path,
                          const std::vector<LossReport>& reports) {
    write_text_atomic(csv_path, format_reports_csv(reports));
    auto json_path = csv_path;
    json_path.replace_extension(".json");
    write_text_atomic(json_path, reports_json(reports).dump(2) + "\n");
}

inline std::vector<LossReport> read_reports(const std::filesystem::path& path) {
    const auto rows = split_csv(read_text(path));
    const auto where = path.string();
    if (rows.empty()) fail(ErrorKind::parse, where + ": empty report");
    std::vector<LossReport> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() != 6) parse_fail(where, rows[r].line, 1, "report rows need 6 fields");
        auto num = [&](std::size_t j) {
            if (f[j].text == "inf") return std::numeric_limits<double>::infinity();
            return parse_number(f[j], rows[r].line, where);
        };
        out.push_back({std::string(f[0].text), std::string(f[1].text), num(2), num(3), num(4),
                       num(5)});
    }
    return out;
}

}  // namespace ed::io
