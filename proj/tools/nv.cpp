#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "nv/evolve.hpp"
#include "nv/inverse.hpp"
#include "nv/io.hpp"
#include "nv/parallel.hpp"
#include "nv/scan.hpp"
#include "nv/scatter.hpp"
#include "nv/solutions.hpp"

using namespace nv;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0, kError = 1, kFlagged = 2;

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

std::vector<double> parse_list(const std::string& s, size_t expected) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        double x = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') throw InvalidArgument("cannot parse '" + item + "' as a number");
        v.push_back(x);
    }
    if (expected && v.size() != expected)
        throw InvalidArgument("expected " + std::to_string(expected) + " comma-separated numbers, got '" + s + "'");
    return v;
}

// key=value,key=value
std::map<std::string, double> parse_params(const std::string& s) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("--params expects key=value pairs, got '" + item + "'");
        out[item.substr(0, eq)] = parse_list(item.substr(eq + 1), 1)[0];
    }
    return out;
}

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw InvalidArgument("sample count must be positive");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

PeriodicGrid parse_grid(const std::string& s) {
    auto v = parse_list(s, 2);
    return PeriodicGrid(v[0], static_cast<int>(v[1]));
}

bool is_builtin(const std::string& s) { return s.rfind("builtin:", 0) == 0; }

Potential load_potential(const std::string& spec, int n, double lambda) {
    if (!is_builtin(spec)) return make_potential(read_nvf(spec), Classification::unknown);
    std::string name = spec.substr(8);
    if (name == "gaussian-sigma") return conductivity_fixture(ConductivityKind::gaussian_sigma, default_fixture_grid(n));
    if (name == "lambda-bump") return lambda_bump({lambda}, PeriodicGrid(2.0, n));
    if (name == "ring") return ring_scan_potential(n);
    if (name == "zero") return make_potential(Field2D(PeriodicGrid(2.0, n), true), Classification::critical, 0.5);
    throw InvalidArgument("unknown builtin potential '" + name + "' (gaussian-sigma, lambda-bump, ring, zero)");
}

Field2D builtin_solution(const std::string& name, const std::map<std::string, double>& p, double t,
                         const PeriodicGrid& g) {
    if (name == "1soliton") return sample_q(kdv_soliton(param(p, "c", 1.0)), g, t, 2);
    if (name == "ring")
        return kdv_ring(g, param(p, "amplitude", 0.5), param(p, "radius", 20.0), param(p, "width", 2.0));
    HirotaParams hp;
    hp.k1 = param(p, "k1", hp.k1);
    hp.C1 = param(p, "C1", hp.C1);
    hp.k2 = param(p, "k2", hp.k2);
    hp.C2 = param(p, "C2", hp.C2);
    if (name == "hirota1") return sample_q(to_canonical(hirota(1, hp)), g, t, 2);
    if (name == "hirota2") return sample_q(to_canonical(hirota(2, hp)), g, t, 2);
    if (name == "ema-static" || name == "ema-breather") {
        auto s = ema_solution(name == "ema-static" ? EmaKind::static_solution : EmaKind::breather, param(p, "C", 0.0));
        // singular lines are left at zero
        return Field2D::from_function(
            g,
            [&](cplx z) {
                if (s.singular(z.real(), z.imag(), t)) return 0.0;
                return s(z.real(), z.imag(), t).q;
            },
            true);
    }
    if (name == "gaussian-sigma") {
        SigmaSpec spec;
        spec.amplitude = param(p, "amplitude", spec.amplitude);
        spec.width = param(p, "width", spec.width);
        spec.cutoff_inner = param(p, "cutoff_inner", spec.cutoff_inner);
        spec.cutoff_outer = param(p, "cutoff_outer", spec.cutoff_outer);
        return conductivity_fixture(ConductivityKind::gaussian_sigma, g, spec).q;
    }
    if (name == "lambda-bump") return lambda_bump({param(p, "lambda", 0.0)}, g).q;
    throw InvalidArgument("unknown solution '" + name + "'");
}

json diag_json(const Diagnostics& d) {
    json j = {{"time", d.time},
              {"l2_norm", d.l2_norm},
              {"zero_mode", {d.zero_mode.real(), d.zero_mode.imag()}},
              {"tail_fraction", d.tail_fraction},
              {"blowup", d.blowup_flag}};
    if (!std::isnan(d.s1_value.real())) {
        j["s1"] = {d.s1_value.real(), d.s1_value.imag()};
        j["s2"] = {d.s2_value.real(), d.s2_value.imag()};
    }
    return j;
}

int count_failed(const std::vector<SampleFlag>& f) {
    return static_cast<int>(std::count(f.begin(), f.end(), SampleFlag::no_converge));
}

void finish(OutputManifest& m, const std::string& path, const Clock& c) {
    m.wall_time = c.seconds();
    if (!path.empty()) m.write(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nv: scattering transform, d-bar inversion and spectral evolution tools"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    std::string manifest_path;
    app.add_option("--threads", threads, "worker threads (0: NV_THREADS or hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--manifest", manifest_path, "manifest path (default: next to the main output)");

    // scatter
    auto* sc = app.add_subcommand("scatter", "scattering transform t(k) along the positive real axis");
    std::string sc_pot, sc_method = "ls", sc_out;
    double sc_kmin = 0.1, sc_kmax = 3.0, sc_lambda = 0.0;
    int sc_knum = 30, sc_n = 256;
    sc->add_option("--potential", sc_pot, "file.nvf or builtin:NAME (gaussian-sigma, lambda-bump, ring, zero)")
        ->required();
    sc->add_option("--method", sc_method, "ls, dn or both (DN below |k| = 0.5)")
        ->check(CLI::IsMember({"ls", "dn", "both"}));
    sc->add_option("--kmin", sc_kmin, "smallest |k|");
    sc->add_option("--kmax", sc_kmax, "largest |k|");
    sc->add_option("--knum", sc_knum, "number of k samples")->check(CLI::PositiveNumber);
    sc->add_option("--n", sc_n, "grid points per axis for builtin potentials");
    sc->add_option("--lambda", sc_lambda, "lambda for builtin:lambda-bump");
    sc->add_option("--out", sc_out, "profile CSV")->required();

    // inverse
    auto* inv = app.add_subcommand("inverse", "reconstruct q from scattering data by the d-bar method");
    std::string inv_in, inv_method = "q", inv_out;
    double inv_R = -1.0, inv_tau = 0.0, inv_zhalf = 1.0;
    int inv_zn = 32, inv_kn = 256;
    inv->add_option("--tprofile", inv_in, "radial profile CSV (from scatter) or t field NVF")->required();
    inv->add_option("--radius", inv_R, "truncation radius R (<= 0: default rule)");
    inv->add_option("--zgrid", inv_zn, "z lattice points per axis");
    inv->add_option("--zhalf", inv_zhalf, "z lattice half side");
    inv->add_option("--kgrid", inv_kn, "k grid points per axis (profile input)");
    inv->add_option("--tau", inv_tau, "scattering time");
    inv->add_option("--method", inv_method, "q or conductivity")->check(CLI::IsMember({"q", "conductivity"}));
    inv->add_option("--out", inv_out, "reconstructed q (NVF)")->required();

    // roundtrip
    auto* rt = app.add_subcommand("roundtrip", "scatter -> evolve_scattering(0) -> inverse on a fixture");
    std::string rt_fixture = "gaussian-sigma", rt_out;
    double rt_kmax = 14.5, rt_dk = 0.05, rt_R = 14.0, rt_zhalf = 1.0;
    int rt_zn = 32;
    rt->add_option("--fixture", rt_fixture, "gaussian-sigma")->check(CLI::IsMember({"gaussian-sigma"}));
    rt->add_option("--kmax", rt_kmax, "largest sampled |k|");
    rt->add_option("--dk", rt_dk, "profile step");
    rt->add_option("--radius", rt_R, "truncation radius R");
    rt->add_option("--zgrid", rt_zn, "z lattice points per axis");
    rt->add_option("--zhalf", rt_zhalf, "z lattice half side");
    rt->add_option("--out", rt_out, "reconstructed q (NVF)");

    // evolve
    auto* ev = app.add_subcommand("evolve", "spectral time stepping");
    std::string ev_init, ev_params, ev_out;
    double ev_E = 0.0, ev_L = 50.0, ev_dt = 0.01, ev_tend = 1.0;
    int ev_n = 256, ev_every = 0;
    ev->add_option("--init", ev_init, "file.nvf or builtin:NAME (1soliton, ring, hirota1, hirota2)")->required();
    ev->add_option("--params", ev_params, "key=value list for builtin data");
    ev->add_option("--E", ev_E, "energy");
    ev->add_option("--L", ev_L, "half side for builtin data");
    ev->add_option("--n", ev_n, "points per axis for builtin data");
    ev->add_option("--dt", ev_dt, "time step");
    ev->add_option("--tend", ev_tend, "final time");
    ev->add_option("--checkpoint-every", ev_every, "steps between NVF checkpoints (0: none)");
    ev->add_option("--out", ev_out, "output directory")->required();

    // scan
    auto* sn = app.add_subcommand("scan", "lambda sweep of t-profiles with singularity detection");
    std::string sn_family = "lambda-bump", sn_out;
    double sn_lmin = -25.0, sn_lmax = 5.0, sn_kmin = 0.05, sn_kmax = 3.0;
    int sn_lnum = 7, sn_knum = 60;
    bool sn_det2 = false;
    sn->add_option("--family", sn_family, "lambda-bump")->check(CLI::IsMember({"lambda-bump"}));
    sn->add_option("--lmin", sn_lmin, "smallest lambda");
    sn->add_option("--lmax", sn_lmax, "largest lambda");
    sn->add_option("--lnum", sn_lnum, "number of lambdas")->check(CLI::PositiveNumber);
    sn->add_option("--kmin", sn_kmin, "smallest |k|");
    sn->add_option("--kmax", sn_kmax, "largest |k|");
    sn->add_option("--knum", sn_knum, "number of k samples")->check(CLI::PositiveNumber);
    sn->add_flag("--det2", sn_det2, "also compute the renormalized determinant");
    sn->add_option("--out", sn_out, "scan CSV")->required();

    // solution
    auto* so = app.add_subcommand("solution", "sample a closed-form or fixture field");
    std::string so_name, so_params, so_grid = "20,256", so_out, so_pgm;
    double so_t = 0.0;
    so->add_option("--name", so_name, "1soliton, ring, hirota1, hirota2, ema-static, ema-breather, gaussian-sigma, lambda-bump")
        ->required()
        ->check(CLI::IsMember({"1soliton", "ring", "hirota1", "hirota2", "ema-static", "ema-breather",
                               "gaussian-sigma", "lambda-bump"}));
    so->add_option("--params", so_params, "key=value list, e.g. c=2 or k1=1,k2=2");
    so->add_option("--t", so_t, "time");
    so->add_option("--grid", so_grid, "L,n");
    so->add_option("--out", so_out, "field NVF")->required();
    so->add_option("--pgm", so_pgm, "optional 16-bit PGM heat map of Re q");

    // dispersion
    auto* di = app.add_subcommand("dispersion", "linear dispersion relation and velocities");
    std::string di_k;
    di->add_option("--k", di_k, "k1,k2")->required();

    // conserved
    auto* co = app.add_subcommand("conserved", "conserved quantities s_0 .. s_jmax");
    std::string co_pot;
    int co_jmax = 2, co_n = 256;
    double co_lambda = 0.0;
    co->add_option("--potential", co_pot, "file.nvf or builtin:NAME")->required();
    co->add_option("--jmax", co_jmax, "largest index (<= 2)");
    co->add_option("--n", co_n, "grid points per axis for builtin potentials");
    co->add_option("--lambda", co_lambda, "lambda for builtin:lambda-bump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "nv: " << e.what() << "\nRun with --help for usage.\n";
        return kError;
    }

    try {
        if (threads > 0) set_thread_count(threads);
        Clock clock;
        OutputManifest m;
        m.command = app.get_subcommands().front()->get_name();
        m.parameters["threads"] = thread_count();
        auto manifest_for = [&](const std::string& main) {
            return manifest_path.empty() ? main + ".manifest.json" : manifest_path;
        };

        if (*sc) {
            Potential p = load_potential(sc_pot, sc_n, sc_lambda);
            auto ksr = linspace(sc_kmin, sc_kmax, sc_knum);
            std::vector<cplx> ks(ksr.begin(), ksr.end());
            ScatterMethod meth = sc_method == "ls" ? ScatterMethod::ls
                                 : sc_method == "dn" ? ScatterMethod::dn
                                                     : ScatterMethod::both;
            ScatteringData d = scatter_sweep(p, ks, meth);
            write_scatter_csv(sc_out, d);
            m.parameters.update({{"potential", sc_pot}, {"method", sc_method}, {"kmin", sc_kmin}, {"kmax", sc_kmax},
                                 {"knum", sc_knum}, {"n", sc_n}, {"lambda", sc_lambda}});
            m.add_file(sc_out);
            int bad = count_failed(d.flags);
            m.diagnostics = {{"no_converge", bad}, {"support_radius", p.support_radius},
                             {"classification", to_string(p.hint)}};
            finish(m, manifest_for(sc_out), clock);
            std::cout << "wrote " << d.k_points.size() << " samples to " << sc_out << " (" << bad
                      << " not converged)\n";
            return bad ? kFlagged : kOk;
        }

        if (*inv) {
            TSharpField ts;
            if (fs::path(inv_in).extension() == ".nvf") {
                ts = tsharp_from_field(read_nvf(inv_in), inv_R);
            } else {
                ScatteringData d = read_scatter_csv(inv_in);
                std::vector<double> kabs;
                for (cplx k : d.k_points) {
                    if (k.imag() != 0.0 || k.real() <= 0.0)
                        throw InvalidArgument("profile input must sample the positive real k axis");
                    kabs.push_back(k.real());
                }
                if (count_failed(d.flags)) throw InvalidArgument("profile contains non-converged samples");
                ts = tsharp_from_profile(kabs, d.t_values, inv_R, inv_kn);
            }
            PeriodicGrid zg(inv_zhalf, inv_zn);
            ReconstructionResult r = inv_method == "q" ? reconstruct_q(ts, zg, inv_tau)
                                                       : reconstruct_conductivity(ts, zg, inv_tau);
            write_nvf(inv_out, r.q);
            m.parameters.update({{"tprofile", inv_in}, {"radius", ts.truncation_radius}, {"zgrid", inv_zn},
                                 {"zhalf", inv_zhalf}, {"tau", inv_tau}, {"method", inv_method}});
            m.add_file(inv_out);
            m.diagnostics = {{"failures", r.failures}, {"max_abs_q", max_abs(r.q)}};
            finish(m, manifest_for(inv_out), clock);
            std::cout << "reconstructed " << zg.n << "x" << zg.n << " lattice into " << inv_out << " ("
                      << r.failures << " failed solves)\n";
            return r.failures ? kFlagged : kOk;
        }

        if (*rt) {
            Potential p = conductivity_fixture(ConductivityKind::gaussian_sigma, default_fixture_grid());
            std::vector<double> kabs;
            std::vector<cplx> ks;
            for (double k = rt_dk; k <= rt_kmax + 1e-12; k += rt_dk) {
                kabs.push_back(k);
                ks.push_back(k);
            }
            ScatteringData d = scatter_sweep(p, ks, ScatterMethod::both);
            int bad = count_failed(d.flags);
            if (bad) throw NotConverged("roundtrip: scattering samples failed to converge");
            TSharpField ts = evolve_scattering(tsharp_from_profile(kabs, d.t_values, rt_R), 0.0);
            PeriodicGrid zg(rt_zhalf, rt_zn);
            ReconstructionResult r = reconstruct_q(ts, zg);
            double num = 0.0, den = 0.0;
            for (int jy = 0; jy < zg.n; ++jy)
                for (int jx = 0; jx < zg.n; ++jx) {
                    cplx z = zg.point(jy, jx);
                    double ref = p.value(z.real(), z.imag());
                    num = std::max(num, std::abs(r.q(jy, jx).real() - ref));
                    den = std::max(den, std::abs(ref));
                }
            double err = num / den;
            m.parameters.update({{"fixture", rt_fixture}, {"kmax", rt_kmax}, {"dk", rt_dk}, {"radius", rt_R},
                                 {"zgrid", rt_zn}, {"zhalf", rt_zhalf}});
            m.diagnostics = {{"rel_linf", err}, {"failures", r.failures}};
            std::string mpath = manifest_path;
            if (!rt_out.empty()) {
                write_nvf(rt_out, r.q);
                m.add_file(rt_out);
                if (mpath.empty()) mpath = rt_out + ".manifest.json";
            }
            finish(m, mpath, clock);
            std::cout << "roundtrip rel. Linf error " << format_double(err) << "\n";
            return r.failures ? kFlagged : kOk;
        }

        if (*ev) {
            Field2D q0;
            if (is_builtin(ev_init)) {
                PeriodicGrid g(ev_L, ev_n);
                q0 = builtin_solution(ev_init.substr(8), parse_params(ev_params), 0.0, g);
            } else {
                q0 = read_nvf(ev_init);
                q0.set_real(true);
            }
            EvolutionConfig cfg;
            cfg.energy = ev_E;
            cfg.dt = ev_dt;
            cfg.t_end = ev_tend;
            cfg.checkpoint_every = ev_every;
            fs::create_directories(ev_out);
            std::vector<std::string> written;
            auto cp = [&](const EvolutionState& s) {
                char name[64];
                std::snprintf(name, sizeof name, "checkpoint_%08ld.nvf", s.steps);
                std::string path = (fs::path(ev_out) / name).string();
                write_nvf(path, s.q());
                written.push_back(path);
            };
            EvolutionState s = run(q0, cfg, cp);
            std::string fin = (fs::path(ev_out) / "final.nvf").string();
            write_nvf(fin, s.q());
            for (const auto& w : written) m.add_file(w);
            m.add_file(fin);
            m.parameters.update({{"init", ev_init}, {"params", ev_params}, {"E", ev_E}, {"L", q0.grid().half_side}, {"n", q0.n()},
                                 {"dt", ev_dt}, {"tend", ev_tend}, {"checkpoint_every", ev_every}});
            json hist = json::array();
            for (const auto& d : s.history) hist.push_back(diag_json(d));
            m.diagnostics = {{"steps", s.steps}, {"final_time", s.time}, {"blowup", s.blowup}, {"history", hist}};
            if (s.blowup) m.diagnostics["blowup_time"] = s.blowup_time;
            finish(m, manifest_path.empty() ? (fs::path(ev_out) / "manifest.json").string() : manifest_path, clock);
            std::cout << "evolved to t = " << s.time << " in " << s.steps << " steps";
            if (s.blowup) std::cout << "; blow-up detected at t = " << s.blowup_time;
            std::cout << "\n";
            return s.blowup ? kFlagged : kOk;
        }

        if (*sn) {
            ScanOptions opt;
            opt.with_det2 = sn_det2;
            ScanResult r = lambda_sweep(linspace(sn_lmin, sn_lmax, sn_lnum), linspace(sn_kmin, sn_kmax, sn_knum), opt);
            write_scan_csv(sn_out, r);
            m.parameters.update({{"family", sn_family}, {"lmin", sn_lmin}, {"lmax", sn_lmax}, {"lnum", sn_lnum},
                                 {"kmin", sn_kmin}, {"kmax", sn_kmax}, {"knum", sn_knum}, {"det2", sn_det2}});
            m.add_file(sn_out);
            int bad = 0;
            json radii = json::array();
            for (size_t i = 0; i < r.lambdas.size(); ++i) {
                bad += count_failed(r.flags[i]);
                radii.push_back({{"lambda", r.lambdas[i]}, {"singular_radii", r.singular_radii[i]}});
            }
            m.diagnostics = {{"no_converge", bad}, {"singular_radii", radii}};
            finish(m, manifest_for(sn_out), clock);
            for (size_t i = 0; i < r.lambdas.size(); ++i) {
                std::cout << "lambda " << r.lambdas[i] << ": " << r.singular_radii[i].size() << " singular radii";
                for (double x : r.singular_radii[i]) std::cout << ' ' << x;
                std::cout << "\n";
            }
            return bad ? kFlagged : kOk;
        }

        if (*so) {
            PeriodicGrid g = parse_grid(so_grid);
            auto params = parse_params(so_params);
            Field2D f = builtin_solution(so_name, params, so_t, g);
            write_nvf(so_out, f);
            m.add_file(so_out);
            m.parameters.update({{"name", so_name}, {"params", params}, {"t", so_t}, {"grid", so_grid}});
            if (!so_pgm.empty()) {
                PgmMapping pm = write_pgm16(so_pgm, f);
                m.add_file(so_pgm);
                m.diagnostics["pgm_mapping"] = {{"lo", pm.lo}, {"hi", pm.hi}};
            }
            finish(m, manifest_for(so_out), clock);
            std::cout << "wrote " << so_name << " on " << g.n << "x" << g.n << " grid to " << so_out << "\n";
            return kOk;
        }

        if (*di) {
            auto k = parse_list(di_k, 2);
            double w = dispersion(k[0], k[1]);
            auto cg = group_velocity(k[0], k[1]);
            std::cout << "omega = " << format_double(w) << "\n";
            if (k[0] != 0.0 || k[1] != 0.0) {
                auto cp = phase_velocity(k[0], k[1]);
                std::cout << "phase velocity = (" << format_double(cp[0]) << ", " << format_double(cp[1]) << ")\n";
            } else {
                std::cout << "phase velocity = undefined at k = 0\n";
            }
            std::cout << "group velocity = (" << format_double(cg[0]) << ", " << format_double(cg[1]) << ")\n";
            m.parameters["k"] = k;
            m.diagnostics = {{"omega", w}, {"group_velocity", cg}};
            finish(m, manifest_path, clock);
            return kOk;
        }

        if (*co) {
            Potential p = load_potential(co_pot, co_n, co_lambda);
            auto s = conserved_quantities(p, co_jmax);
            json vals = json::array();
            for (size_t j = 0; j < s.size(); ++j) {
                std::cout << "s" << j << " = " << format_double(s[j].real()) << " + " << format_double(s[j].imag())
                          << "i\n";
                vals.push_back({s[j].real(), s[j].imag()});
            }
            m.parameters.update({{"potential", co_pot}, {"jmax", co_jmax}});
            m.diagnostics = {{"s", vals}};
            finish(m, manifest_path, clock);
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "nv: error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
