#include "grande/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace grande {

namespace {

constexpr char kMagic[8] = {'G', 'R', 'N', 'D', 'F', 'E', 'A', 'T'};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

std::uint64_t read_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_f64_le(std::string& out, double d) {
    append_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_u64(std::string_view token, std::uint64_t& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_lines(const std::string& text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

DenseMatrix load_features_binary(const std::string& path, const std::string& bytes) {
    if (bytes.size() < 24) fail(path, "truncated header at byte " + std::to_string(bytes.size()));
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t n = read_u64_le(p + 8);
    const std::uint64_t d = read_u64_le(p + 16);
    if (n < 2) fail(path, "feature matrix needs at least 2 rows (n >= 2 required for graphs)");
    if (d < 1) fail(path, "feature matrix needs at least 1 column");
    const std::uint64_t expected = 24 + n * d * 8;
    if (bytes.size() != expected)
        fail(path, "payload size mismatch: expected " + std::to_string(expected) +
                       " bytes, found " + std::to_string(bytes.size()) +
                       " (truncated at byte " + std::to_string(bytes.size()) + ")");
    DenseMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    for (std::uint64_t k = 0; k < n * d; ++k) {
        const std::uint64_t bits = read_u64_le(p + 24 + 8 * k);
        const double v = std::bit_cast<double>(bits);
        if (!std::isfinite(v))
            fail(path, "non-finite value at byte " + std::to_string(24 + 8 * k));
        m.values[static_cast<std::size_t>(k)] = v;
    }
    return m;
}

DenseMatrix load_features_csv(const std::string& path, const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty()) fail(path, "empty file");

    std::size_t first_row = 0;
    {
        double probe;
        const auto fields = split_fields(lines[0]);
        if (!parse_double(fields[0], probe)) first_row = 1;  // header row
    }
    if (lines.size() <= first_row) fail(path, "no data rows");

    std::size_t cols = 0;
    std::vector<double> values;
    for (std::size_t li = first_row; li < lines.size(); ++li) {
        if (lines[li].empty()) fail(path, "line " + std::to_string(li + 1) + ": empty row");
        const auto fields = split_fields(lines[li]);
        if (cols == 0) {
            cols = fields.size();
        } else if (fields.size() != cols) {
            fail(path, "line " + std::to_string(li + 1) + ": expected " + std::to_string(cols) +
                           " fields, found " + std::to_string(fields.size()));
        }
        for (std::size_t f = 0; f < fields.size(); ++f) {
            double v;
            if (!parse_double(fields[f], v))
                fail(path, "line " + std::to_string(li + 1) + ": field " + std::to_string(f + 1) +
                               " is not numeric");
            if (!std::isfinite(v))
                fail(path, "line " + std::to_string(li + 1) + ": field " + std::to_string(f + 1) +
                               " is not finite");
            values.push_back(v);
        }
    }
    const std::size_t rows = values.size() / cols;
    if (rows < 2) fail(path, "feature matrix needs at least 2 rows (n >= 2 required for graphs)");
    DenseMatrix m(rows, cols);
    m.values = std::move(values);
    return m;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

DenseMatrix load_features(const std::string& path) {
    const std::string bytes = read_text_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kMagic, 8) == 0)
        return load_features_binary(path, bytes);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "GRND", 4) == 0)
        fail(path, "bad magic in binary header (byte 0)");
    return load_features_csv(path, bytes);
}

void save_features_binary(const std::string& path, const DenseMatrix& m) {
    std::string out;
    out.reserve(24 + m.values.size() * 8);
    out.append(kMagic, 8);
    append_u64_le(out, m.rows);
    append_u64_le(out, m.cols);
    for (double v : m.values) append_f64_le(out, v);
    write_text_file(path, out);
}

void save_features_csv(const std::string& path, const DenseMatrix& m) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
            out.append(buf, ptr);
            out.push_back(j + 1 < m.cols ? ',' : '\n');
        }
    }
    write_text_file(path, out);
}

std::vector<int> load_labels(const std::string& path) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) fail(path, "empty file");

    std::vector<long long> by_node;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (lines[li].empty()) fail(path, "line " + std::to_string(li + 1) + ": empty row");
        const auto fields = split_fields(lines[li]);
        if (fields.size() != 2)
            fail(path, "line " + std::to_string(li + 1) +
                           ": expected \"node_index,class_index\"");
        std::uint64_t node, cls;
        if (!parse_u64(fields[0], node))
            fail(path, "line " + std::to_string(li + 1) + ": node index is not an integer");
        if (!parse_u64(fields[1], cls))
            fail(path, "line " + std::to_string(li + 1) + ": class index is not an integer");
        if (cls > 1000000)
            fail(path, "line " + std::to_string(li + 1) + ": implausible class index " +
                           std::to_string(cls));
        if (node >= by_node.size()) by_node.resize(node + 1, -1);
        if (by_node[node] >= 0)
            fail(path, "line " + std::to_string(li + 1) + ": duplicate node " +
                           std::to_string(node));
        by_node[node] = static_cast<long long>(cls);
    }
    for (std::size_t i = 0; i < by_node.size(); ++i)
        if (by_node[i] < 0) fail(path, "node " + std::to_string(i) + " has no label");

    std::vector<int> labels(by_node.size());
    long long max_class = -1;
    for (std::size_t i = 0; i < by_node.size(); ++i) {
        labels[i] = static_cast<int>(by_node[i]);
        max_class = std::max(max_class, by_node[i]);
    }
    std::vector<bool> seen(static_cast<std::size_t>(max_class) + 1, false);
    for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c])
            fail(path, "class indices are not contiguous: class " + std::to_string(c) +
                           " never appears (max class " + std::to_string(max_class) + ")");
    return labels;
}

void save_labels_csv(const std::string& path, const std::vector<int>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    write_text_file(path, out);
}

void save_edge_list(const std::string& path, const NeighborGraph& g) {
    std::string out;
    for (const auto& [a, b] : g.edges)
        out += std::to_string(a) + " " + std::to_string(b) + "\n";
    write_text_file(path, out);
}

}  // namespace grande
