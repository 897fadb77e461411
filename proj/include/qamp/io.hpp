#pragma once
// File formats for the command-line surface: CSV tables with '#' comment
// headers, key=value run manifests with output checksums, quadrature-sample
// CSV plus metadata sidecar (bit-exact round trip), and the flat key=value
// experiment config format.

#include "qamp/tomography.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qamp {

inline constexpr const char* tool_version = "0.1.0";

// shortest representation that parses back to the same double
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> comments; // without the leading "# "
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footers;

    void add_row(const std::vector<double>& values);
    std::string to_csv() const;
    std::string to_json() const; // mirror of the same content
};

struct RunManifest {
    std::string command;
    std::string kernel_backend;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> parameters;           // sorted by key
    std::vector<std::pair<std::string, std::string>> outputs; // file, checksum

    std::string to_text() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string checksum_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

// "min:max:step" inclusive of both ends within step/2; a bare number is a
// single point
std::vector<double> parse_range(const std::string& text);

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int l, const std::string& msg)
        : std::runtime_error(msg), line(l) {}
};

// flat key=value with [section] prefixes ("section.key") and '#' comments
std::map<std::string, std::string> parse_config(const std::string& text);

// quadrature dataset serialization: CSV "theta,x" plus sidecar metadata
std::string dataset_to_csv(const QuadratureDataset& data);
std::string dataset_metadata(const QuadratureDataset& data);
QuadratureDataset dataset_from_csv(const std::string& csv, const std::string& metadata);

} // namespace qamp
