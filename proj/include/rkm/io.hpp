#ifndef RKM_IO_HPP
#define RKM_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rkm/types.hpp"

namespace rkm {

/// Malformed input file. row and column are 1-based; 0 means "not cell specific".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

inline std::optional<double> parse_double(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        return std::nullopt;
    }
    return value;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path, 0, 0);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Shortest decimal form that round-trips.
inline std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

} // namespace detail

/// Rows of a comma-separated numeric grid. A first row containing any
/// non-numeric cell is treated as a header and skipped; blank lines are ignored.
inline Matrix parse_csv(std::string_view text, std::vector<std::string> *header = nullptr) {
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t line_number = 0;
    bool first_content_line = true;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = detail::trim(text.substr(start, end - start));
        ++line_number;
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const auto cells = detail::split_commas(line);
        std::vector<double> values;
        values.reserve(cells.size());
        std::optional<std::size_t> bad_column;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto value = detail::parse_double(cells[c]);
            if (!value) {
                if (!bad_column) {
                    bad_column = c + 1;
                }
                continue;
            }
            values.push_back(*value);
        }
        if (bad_column && first_content_line) {
            first_content_line = false;
            width = cells.size();
            if (header) {
                header->assign(cells.begin(), cells.end());
            }
            continue;
        }
        first_content_line = false;
        if (bad_column) {
            throw ParseError("non-numeric cell at row " + std::to_string(line_number) + ", column " +
                                 std::to_string(*bad_column),
                             line_number, *bad_column);
        }
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError("ragged row " + std::to_string(line_number) + ": expected " + std::to_string(width) +
                                 " columns, found " + std::to_string(cells.size()),
                             line_number, 0);
        }
        rows.push_back(std::move(values));
        if (end == text.size()) {
            break;
        }
    }
    if (rows.empty()) {
        throw ParseError("no numeric rows in input", line_number, 0);
    }
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            out(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return out;
}

inline DataMatrix load_csv(const std::string &path) {
    Matrix values = parse_csv(detail::read_file(path));
    if (!values.allFinite()) {
        throw ParseError(path + " contains non-finite values", 0, 0);
    }
    return DataMatrix(std::move(values));
}

/// Labels from the first column of a CSV file (header allowed), compacted
/// to 0..k-1 in order of first appearance.
inline Assignment load_labels(const std::string &path) {
    const Matrix values = parse_csv(detail::read_file(path));
    std::vector<long long> raw;
    for (Index r = 0; r < values.rows(); ++r) {
        const double v = values(r, 0);
        if (v != std::floor(v)) {
            throw ParseError("label at row " + std::to_string(r + 1) + " is not an integer", r + 1, 1);
        }
        raw.push_back(static_cast<long long>(v));
    }
    return Assignment::from_raw(raw);
}

inline std::string format_csv(const Matrix &values, const std::vector<std::string> &header = {}) {
    std::string out;
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            out += (c ? "," : "") + header[c];
        }
        out += '\n';
    }
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) {
            if (c) {
                out += ',';
            }
            out += detail::format_double(values(r, c));
        }
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError("cannot write " + path, 0, 0);
    }
    out << text;
}

inline void write_csv(const std::string &path, const Matrix &values, const std::vector<std::string> &header = {}) {
    write_text(path, format_csv(values, header));
}

inline std::string format_labels_csv(const Assignment &labels) {
    std::string out = "label\n";
    for (int label : labels.labels()) {
        out += std::to_string(label) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Result documents

inline constexpr std::string_view result_schema_version = "rkm-result/1";

using Json = nlohmann::json;

/// Matrix with explicit shape; data order is column-major or row-major.
inline Json matrix_to_json(const Matrix &m, bool column_major) {
    Json data = Json::array();
    if (column_major) {
        for (Index c = 0; c < m.cols(); ++c) {
            for (Index r = 0; r < m.rows(); ++r) {
                data.push_back(m(r, c));
            }
        }
    } else {
        for (Index r = 0; r < m.rows(); ++r) {
            for (Index c = 0; c < m.cols(); ++c) {
                data.push_back(m(r, c));
            }
        }
    }
    return Json{{"rows", m.rows()},
                {"cols", m.cols()},
                {"order", column_major ? "column-major" : "row-major"},
                {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json &j) {
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto order = j.at("order").get<std::string>();
    const auto &data = j.at("data");
    if (static_cast<Index>(data.size()) != rows * cols) {
        throw ParseError("matrix data length does not match its shape", 0, 0);
    }
    if (order != "column-major" && order != "row-major") {
        throw ParseError("unknown matrix order '" + order + "'", 0, 0);
    }
    Matrix m(rows, cols);
    std::size_t at = 0;
    if (order == "column-major") {
        for (Index c = 0; c < cols; ++c) {
            for (Index r = 0; r < rows; ++r) {
                m(r, c) = data[at++].get<double>();
            }
        }
    } else {
        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) {
                m(r, c) = data[at++].get<double>();
            }
        }
    }
    return m;
}

struct SolutionRecord {
    /// p x q, serialized column-major.
    Matrix loading;
    /// k x q, serialized row-major.
    Matrix centroids;
    std::vector<int> labels;
    double loss = 0.0;
    int iterations = 0;

    bool operator==(const SolutionRecord &) const = default;
};

inline SolutionRecord to_record(const RkmSolution &sol) {
    return SolutionRecord{sol.loading.values(), sol.centroids.values(), sol.assignment.labels(), sol.loss,
                          sol.iterations};
}

struct ResultDocument {
    std::string schema_version{result_schema_version};
    std::string command;
    Json config = Json::object();
    std::optional<SolutionRecord> solution;
    /// Evaluation against provided truth, e.g. {"ari": 0.98}.
    Json metrics = Json::object();
    /// Command-specific results (profiles, reports, tables).
    Json results = Json::object();
    Json timing = Json::object();

    bool operator==(const ResultDocument &) const = default;
};

inline Json to_json(const ResultDocument &doc) {
    Json j{{"schema_version", doc.schema_version},
           {"command", doc.command},
           {"config", doc.config},
           {"metrics", doc.metrics},
           {"results", doc.results},
           {"timing", doc.timing}};
    if (doc.solution) {
        const auto &s = *doc.solution;
        j["solution"] = Json{{"loading", matrix_to_json(s.loading, true)},
                             {"centroids", matrix_to_json(s.centroids, false)},
                             {"labels", s.labels},
                             {"loss", s.loss},
                             {"iterations", s.iterations}};
    }
    return j;
}

inline ResultDocument result_from_json(const Json &j) {
    ResultDocument doc;
    doc.schema_version = j.at("schema_version").get<std::string>();
    if (doc.schema_version != result_schema_version) {
        throw ParseError("unsupported result schema '" + doc.schema_version + "'", 0, 0);
    }
    doc.command = j.at("command").get<std::string>();
    doc.config = j.value("config", Json::object());
    doc.metrics = j.value("metrics", Json::object());
    doc.results = j.value("results", Json::object());
    doc.timing = j.value("timing", Json::object());
    if (j.contains("solution")) {
        const auto &s = j.at("solution");
        doc.solution = SolutionRecord{matrix_from_json(s.at("loading")), matrix_from_json(s.at("centroids")),
                                      s.at("labels").get<std::vector<int>>(), s.at("loss").get<double>(),
                                      s.at("iterations").get<int>()};
    }
    return doc;
}

inline std::string serialize(const ResultDocument &doc) { return to_json(doc).dump(2) + "\n"; }

inline ResultDocument parse_result(std::string_view text) {
    try {
        return result_from_json(Json::parse(text));
    } catch (const Json::exception &e) {
        throw ParseError(std::string("malformed result document: ") + e.what(), 0, 0);
    }
}

} // namespace rkm

#endif
