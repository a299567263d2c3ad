#include "nv/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "nv/parallel.hpp"

namespace nv {

namespace {
std::atomic<int> g_threads{0};
}

int thread_count() {
    int t = g_threads.load();
    if (t > 0) return t;
    if (const char* env = std::getenv("NV_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(int n) {
    if (n < 0) throw InvalidArgument("thread count must be non-negative");
    g_threads = n;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IOError("CSV: cannot parse number '" + s + "'");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IOError("cannot open '" + path + "' for writing");
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IOError("cannot open '" + path + "'");
    return f;
}

const char* kScatterHeader = "k_re,k_im,t_re,t_im,s_re,s_im,flag,iterations,residual";

}  // namespace

void write_scatter_csv(const std::string& path, const ScatteringData& d) {
    auto f = open_out(path);
    f << kScatterHeader << '\n';
    for (size_t i = 0; i < d.k_points.size(); ++i) {
        f << format_double(d.k_points[i].real()) << ',' << format_double(d.k_points[i].imag()) << ','
          << format_double(d.t_values[i].real()) << ',' << format_double(d.t_values[i].imag()) << ','
          << format_double(d.s_values[i].real()) << ',' << format_double(d.s_values[i].imag()) << ','
          << to_string(d.flags[i]) << ',' << d.iterations[i] << ',' << format_double(d.residuals[i]) << '\n';
    }
    if (!f) throw IOError("write failed for '" + path + "'");
}

ScatteringData read_scatter_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line) || line != kScatterHeader) throw IOError("'" + path + "' is not a scatter profile");
    ScatteringData d;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto c = split(line);
        if (c.size() != 9) throw IOError("scatter CSV: expected 9 columns");
        d.k_points.emplace_back(parse_double(c[0]), parse_double(c[1]));
        d.t_values.emplace_back(parse_double(c[2]), parse_double(c[3]));
        d.s_values.emplace_back(parse_double(c[4]), parse_double(c[5]));
        d.flags.push_back(sample_flag_from_string(c[6]));
        d.iterations.push_back(static_cast<int>(parse_double(c[7])));
        d.residuals.push_back(parse_double(c[8]));
    }
    return d;
}

void write_scan_csv(const std::string& path, const ScanResult& r) {
    auto f = open_out(path);
    bool det = r.det2.size() > 0;
    f << "lambda,k,t_re,t_im,flag" << (det ? ",det2" : "") << '\n';
    for (size_t i = 0; i < r.lambdas.size(); ++i)
        for (size_t j = 0; j < r.k_samples.size(); ++j) {
            f << format_double(r.lambdas[i]) << ',' << format_double(r.k_samples[j]) << ','
              << format_double(r.t_profiles(i, j).real()) << ',' << format_double(r.t_profiles(i, j).imag()) << ','
              << to_string(r.flags[i][j]);
            if (det) f << ',' << format_double(r.det2(i, j));
            f << '\n';
        }
    if (!f) throw IOError("write failed for '" + path + "'");
}

ScanResult read_scan_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw IOError("scan CSV: missing header");
    bool det;
    if (line == "lambda,k,t_re,t_im,flag")
        det = false;
    else if (line == "lambda,k,t_re,t_im,flag,det2")
        det = true;
    else
        throw IOError("'" + path + "' is not a scan CSV");
    struct Row {
        double l, k;
        cplx t;
        SampleFlag fl;
        double d;
    };
    std::vector<Row> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto c = split(line);
        if (c.size() != (det ? 6u : 5u)) throw IOError("scan CSV: wrong column count");
        rows.push_back({parse_double(c[0]), parse_double(c[1]), {parse_double(c[2]), parse_double(c[3])},
                        sample_flag_from_string(c[4]), det ? parse_double(c[5]) : 0.0});
    }
    ScanResult r;
    for (const auto& row : rows) {
        if (r.lambdas.empty() || r.lambdas.back() != row.l) r.lambdas.push_back(row.l);
        if (r.lambdas.size() == 1) r.k_samples.push_back(row.k);
    }
    const size_t nl = r.lambdas.size(), nk = r.k_samples.size();
    if (rows.size() != nl * nk) throw IOError("scan CSV: rows do not form a lambda x k grid");
    r.t_profiles = Eigen::MatrixXcd::Zero(nl, nk);
    r.flags.assign(nl, std::vector<SampleFlag>(nk));
    if (det) r.det2 = Eigen::MatrixXd::Zero(nl, nk);
    for (size_t i = 0; i < nl; ++i)
        for (size_t j = 0; j < nk; ++j) {
            const Row& row = rows[i * nk + j];
            if (row.l != r.lambdas[i] || row.k != r.k_samples[j]) throw IOError("scan CSV: rows out of order");
            r.t_profiles(i, j) = row.t;
            r.flags[i][j] = row.fl;
            if (det) r.det2(i, j) = row.d;
        }
    r.singular_radii.resize(nl);
    for (size_t i = 0; i < nl; ++i) {
        std::vector<cplx> t(nk);
        for (size_t j = 0; j < nk; ++j) t[j] = r.t_profiles(i, j);
        r.singular_radii[i] = detect_singularities(r.k_samples, t, r.flags[i]);
    }
    return r;
}

PgmMapping write_pgm16(const std::string& path, const Field2D& fld) {
    const int n = fld.n();
    PgmMapping m;
    m.lo = fld.samples().real().minCoeff();
    m.hi = fld.samples().real().maxCoeff();
    double span = m.hi > m.lo ? m.hi - m.lo : 1.0;
    auto f = open_out(path);
    f << "P5\n" << n << ' ' << n << "\n65535\n";
    // top row is the largest y
    for (int jy = n - 1; jy >= 0; --jy)
        for (int jx = 0; jx < n; ++jx) {
            double u = (fld(jy, jx).real() - m.lo) / span;
            auto v = static_cast<unsigned>(std::lround(std::clamp(u, 0.0, 1.0) * 65535.0));
            char b[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
            f.write(b, 2);
        }
    if (!f) throw IOError("write failed for '" + path + "'");
    return m;
}

std::string sha256_file(const std::string& path) {
    auto f = open_in(path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw IOError("sha256: cannot allocate context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (f) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void OutputManifest::add_file(const std::string& path) { files.emplace_back(path, sha256_file(path)); }

nlohmann::json OutputManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["files"] = nlohmann::json::array();
    for (const auto& [p, h] : files) j["files"].push_back({{"path", p}, {"sha256", h}});
    j["wall_time_seconds"] = wall_time;
    j["diagnostics"] = diagnostics;
    return j;
}

void OutputManifest::write(const std::string& path) const {
    auto f = open_out(path);
    f << to_json().dump(2) << '\n';
    if (!f) throw IOError("write failed for '" + path + "'");
}

nlohmann::json RunConfig::to_json() const {
    return {{"command", command}, {"parameters", parameters}, {"output_dir", output_dir}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        c.parameters = j.at("parameters");
        c.output_dir = j.value("output_dir", std::string("."));
    } catch (const nlohmann::json::exception& e) {
        throw IOError(std::string("run config: ") + e.what());
    }
    return c;
}

void RunConfig::save(const std::string& path) const {
    auto f = open_out(path);
    f << to_json().dump(2) << '\n';
    if (!f) throw IOError("write failed for '" + path + "'");
}

RunConfig RunConfig::load(const std::string& path) {
    auto f = open_in(path);
    try {
        return from_json(nlohmann::json::parse(f));
    } catch (const nlohmann::json::parse_error& e) {
        throw IOError(std::string("run config: ") + e.what());
    }
}

}  // namespace nv
