#include "pcpd/io.hpp"

#include "pcpd/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace pcpd {

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) {
        return false;
    }
    std::string field;
    bool quoted = false;
    for (;;) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (c != '\r') {
                field.push_back(c);
            }
        }
        if (!quoted) {
            break;
        }
        // Quoted field continues on the next physical line.
        if (!std::getline(in, line)) {
            break;
        }
        field.push_back('\n');
    }
    fields.push_back(std::move(field));
    return true;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::optional<long long> parse_integer(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::vector<std::string> fields;
    std::size_t line = 0;
    while (read_csv_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && trim(fields[0]).empty()) {
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            const auto v = parse_double(f);
            if (!v) {
                throw InputError(path.string() + ":" + std::to_string(line) + ": not a number: '" + f + "'");
            }
            row.push_back(*v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": expected " +
                             std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InputError(path.string() + ": no data rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw InputError("write failed: " + path.string());
    }
}

} // namespace pcpd
