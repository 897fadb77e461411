#include "qamp/io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qamp {

std::string format_double(double v)
{
    // try increasing precision until the value round-trips
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void CsvTable::add_row(const std::vector<double>& values)
{
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

std::string CsvTable::to_csv() const
{
    std::ostringstream out;
    for (const std::string& c : comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    for (const std::string& f : footers) out << "# " << f << "\n";
    return out.str();
}

std::string CsvTable::to_json() const
{
    nlohmann::ordered_json j;
    j["comments"] = comments;
    j["columns"] = columns;
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const std::string& cell : row) r.push_back(std::strtod(cell.c_str(), nullptr));
        data.push_back(std::move(r));
    }
    j["rows"] = std::move(data);
    j["footers"] = footers;
    return j.dump(2) + "\n";
}

std::string RunManifest::to_text() const
{
    std::ostringstream out;
    out << "command = " << command << "\n";
    out << "version = " << tool_version << "\n";
    out << "kernel_backend = " << kernel_backend << "\n";
    out << "seed = " << seed << "\n";
    for (const auto& [k, v] : parameters) out << "param." << k << " = " << v << "\n";
    for (const auto& [file, sum] : outputs) out << "output." << file << " = " << sum << "\n";
    return out.str();
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string checksum_hex(const std::string& bytes)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(bytes.data(), std::streamsize(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> parse_range(const std::string& text)
{
    const auto bad = [&]() {
        return std::invalid_argument("bad range '" + text + "' (want min:max:step)");
    };
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);

    auto num = [&](const std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) throw bad();
        return v;
    };

    if (parts.size() == 1) return {num(parts[0])};
    if (parts.size() != 3) throw bad();
    const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
    if (hi < lo) throw bad();
    if (step <= 0.0) {
        if (lo == hi) return {lo};
        throw bad();
    }
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = lo + step * i;
        if (v > hi + step / 2) break;
        out.push_back(std::min(v, hi));
    }
    return out;
}

std::map<std::string, std::string> parse_config(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;

    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(lineno, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (!section.empty()) key = section + "." + key;
        if (kv.count(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

std::string dataset_to_csv(const QuadratureDataset& data)
{
    std::ostringstream out;
    out << "theta,x\n";
    for (const QuadratureSample& s : data.samples)
        out << format_double(s.theta) << "," << format_double(s.x) << "\n";
    return out.str();
}

std::string dataset_metadata(const QuadratureDataset& data)
{
    std::ostringstream out;
    out << "eta = " << format_double(data.eta) << "\n";
    out << "seed = " << data.seed << "\n";
    out << "samples = " << data.samples.size() << "\n";
    return out.str();
}

QuadratureDataset dataset_from_csv(const std::string& csv, const std::string& metadata)
{
    QuadratureDataset data;
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "theta,x")
        throw std::runtime_error("dataset CSV must start with 'theta,x'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("dataset CSV row missing comma: " + line);
        QuadratureSample s;
        s.theta = std::strtod(line.substr(0, comma).c_str(), nullptr);
        s.x = std::strtod(line.substr(comma + 1).c_str(), nullptr);
        data.samples.push_back(s);
    }

    const auto kv = parse_config(metadata);
    if (auto it = kv.find("eta"); it != kv.end())
        data.eta = std::strtod(it->second.c_str(), nullptr);
    if (auto it = kv.find("seed"); it != kv.end())
        data.seed = std::strtoull(it->second.c_str(), nullptr, 10);
    if (auto it = kv.find("samples"); it != kv.end()) {
        if (std::stoull(it->second) != data.samples.size())
            throw std::runtime_error("dataset metadata sample count mismatch");
    }
    data.fold();
    return data;
}

} // namespace qamp
