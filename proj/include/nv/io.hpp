#ifndef NV_IO_HPP
#define NV_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nv/scan.hpp"
#include "nv/scatter.hpp"

namespace nv {

// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

void write_scatter_csv(const std::string& path, const ScatteringData& d);
ScatteringData read_scatter_csv(const std::string& path);

// Long format: lambda, k, t_re, t_im, flag[, det2]. Singular radii are recomputed on reading.
void write_scan_csv(const std::string& path, const ScanResult& r);
ScanResult read_scan_csv(const std::string& path);

struct PgmMapping {
    double lo = 0.0, hi = 0.0;  // value lo -> 0, hi -> 65535
};
// 16-bit binary PGM of Re f, linear map from [min, max].
PgmMapping write_pgm16(const std::string& path, const Field2D& f);

std::string sha256_file(const std::string& path);

struct OutputManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::pair<std::string, std::string>> files;  // path, sha256
    double wall_time = 0.0;
    nlohmann::json diagnostics = nlohmann::json::object();

    void add_file(const std::string& path);
    nlohmann::json to_json() const;
    void write(const std::string& path) const;
};

struct RunConfig {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::string output_dir = ".";

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static RunConfig load(const std::string& path);
    bool operator==(const RunConfig& o) const {
        return command == o.command && parameters == o.parameters && output_dir == o.output_dir;
    }
};

}  // namespace nv

#endif
