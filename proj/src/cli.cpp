#include "casimir/cli.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "casimir/io.hpp"
#include "casimir/numerics.hpp"
#include "casimir/sampler.hpp"

namespace casimir::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

std::string render(const RunConfig& cfg, const io::Table& table, const nlohmann::ordered_json& provenance) {
    if (cfg.format == "json") return io::to_json(table, provenance).dump(2) + "\n";
    return io::to_csv(table);
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
    if (cfg.out.empty()) {
        out << content;
        out.flush();
    } else {
        io::write_atomic(cfg.out, content);
    }
}

nlohmann::ordered_json base_provenance(const RunConfig& cfg, const CrossSection& cs) {
    nlohmann::ordered_json p;
    p["program"] = "casimir";
    p["version"] = kVersion;
    p["command"] = cfg.command;
    p["cross_section"] = describe(cs);
    p["area"] = area(cs);
    p["reference_length"] = reference_length(cs);
    if (cfg.h) p["h"] = *cfg.h;
    return p;
}

void add_thermal(nlohmann::ordered_json& p, const RunConfig& cfg) {
    const auto th = thermal_state(cfg);
    switch (thermal_mode(cfg)) {
        case ThermalMode::Unset:
        case ThermalMode::ZeroT: p["regime"] = "zero-T"; break;
        case ThermalMode::Classical: p["regime"] = "classical"; break;
        default: p["regime"] = "finite-T"; break;
    }
    if (th.finite()) {
        p["beta"] = th.beta;
        p["inverse_thermal_wavelength"] = th.inverse_wavelength();
    }
    p["hbar"] = cfg.hbar;
    p["c"] = cfg.c;
    p["kB"] = cfg.k_b;
    p["tol"] = cfg.tol;
    p["spectral_tol"] = cfg.spectral_tol;
}

// Smallest eigenvalue and its total multiplicity across both sets.
std::pair<int, double> lowest_mode(const Spectrum& spec) {
    const double l1 = spec.modes.front().lambda;
    int g = 0;
    for (const auto& m : spec.modes) {
        if (m.lambda > l1 * (1.0 + 1e-12)) break;
        g += m.degeneracy;
    }
    return {g, l1};
}

struct Point {
    ForceResult result;
    double near = 0.0;
    double far = 0.0;
    std::string error;
};

Point evaluate(const Spectrum& spec, double L, const RunConfig& cfg, unsigned inner_threads) {
    ForceOptions opt;
    opt.tol = cfg.tol;
    opt.spectral_tol = cfg.spectral_tol;
    opt.threads = inner_threads;
    const auto th = thermal_state(cfg);
    const auto [g1, l1] = lowest_mode(spec);
    Point p;
    try {
        switch (thermal_mode(cfg)) {
            case ThermalMode::Unset:
            case ThermalMode::ZeroT:
                p.result = force_zero_T(spec, L, opt, th.hbar_c());
                p.near = asymptote_near_T0(spec.area, L, th.hbar_c());
                p.far = asymptote_far_T0(g1, l1, L, th.hbar_c());
                break;
            case ThermalMode::Classical:
                p.result = force_classical(spec, L, th.beta, opt);
                p.near = asymptote_near_classical(spec.area, L, th.beta);
                p.far = asymptote_far_classical(g1, l1, L, th.beta);
                break;
            default:
                p.result = force_finite_T(spec, L, th, opt);
                // quantum plates at short range, the static (m = 0) term at long range
                p.near = asymptote_near_T0(spec.area, L, th.hbar_c());
                p.far = asymptote_far_classical(g1, l1, L, th.beta);
                break;
        }
    } catch (const ToleranceError& e) {
        p.error = e.what();
        p.result.force = std::numeric_limits<double>::quiet_NaN();
        p.result.converged = false;
    }
    return p;
}

std::vector<Point> sweep(const Spectrum& spec, const std::vector<double>& Ls, const RunConfig& cfg) {
    const unsigned inner = Ls.size() == 1 ? cfg.threads : 1u;
    return parallel_map<Point>(Ls.size(), cfg.threads, [&](std::size_t i) { return evaluate(spec, Ls[i], cfg, inner); });
}

Spectrum build_spectrum(const CrossSection& cs, int n, const std::string& bc) {
    if (bc == "both") return combined_spectrum(cs, n);
    return single_spectrum(cs, n, parse_boundary_condition(bc));
}

}  // namespace

void validate(const RunConfig& cfg) {
    const int shapes = (cfg.circle ? 1 : 0) + (cfg.rect.empty() ? 0 : 1) + (cfg.mask_path.empty() ? 0 : 1);
    if (cfg.command != "sample") {
        if (shapes != 1) throw std::invalid_argument("give exactly one of --circle, --rect, --mask");
        if (!cfg.mask_path.empty() && !cfg.h) throw std::invalid_argument("--mask needs --h");
    }
    if (cfg.h && cfg.mask_path.empty()) throw std::invalid_argument("--h only applies to --mask");
    if (cfg.h) require_positive(*cfg.h, "--h");
    if (cfg.circle) require_positive(*cfg.circle, "circle radius");
    for (double v : cfg.rect) require_positive(v, "rectangle side");
    if (cfg.modes < 1) throw std::invalid_argument("--modes must be >= 1");
    if (cfg.bc != "both") parse_boundary_condition(cfg.bc);

    if (cfg.zero_t && (cfg.classical || cfg.temperature || cfg.beta)) {
        throw std::invalid_argument("--zero-T excludes --classical, --temperature and --beta");
    }
    if (cfg.temperature && cfg.beta) throw std::invalid_argument("--temperature and --beta are exclusive");
    if (cfg.classical && !cfg.temperature && !cfg.beta) throw std::invalid_argument("--classical needs --temperature or --beta");
    if (cfg.temperature) require_positive(*cfg.temperature, "--temperature");
    if (cfg.beta) require_positive(*cfg.beta, "--beta");
    require_positive(cfg.hbar, "--hbar");
    require_positive(cfg.c, "--c");
    require_positive(cfg.k_b, "--kB");

    if (!cfg.L.empty() && !cfg.L_grid.empty()) throw std::invalid_argument("--L and --L-grid are exclusive");
    for (double v : cfg.L) require_positive(v, "--L");
    if (!cfg.L_grid.empty()) {
        require_positive(cfg.L_grid[0], "--L-grid MIN");
        require_positive(cfg.L_grid[1], "--L-grid MAX");
        if (cfg.L_grid[1] < cfg.L_grid[0]) throw std::invalid_argument("--L-grid needs MIN <= MAX");
        const double count = cfg.L_grid[2];
        if (!(count >= 1.0) || count != std::floor(count) || count > 1e6) {
            throw std::invalid_argument("--L-grid COUNT must be a positive integer");
        }
    }
    if (cfg.command == "force" && cfg.L.empty() && cfg.L_grid.empty()) throw std::invalid_argument("force needs --L or --L-grid");
    if (cfg.n_list.empty()) throw std::invalid_argument("--N-list must not be empty");
    for (int n : cfg.n_list) {
        if (n < 1) throw std::invalid_argument("--N-list entries must be >= 1");
    }
    if (!(cfg.tol > 0.0) || !(cfg.tol < 1.0)) throw std::invalid_argument("--tol must lie in (0, 1)");
    require_positive(cfg.spectral_tol, "--spectral-tol");
    if (cfg.threads < 1) throw std::invalid_argument("--threads must be >= 1");
    if (cfg.format != "csv" && cfg.format != "json") throw std::invalid_argument("--format must be csv or json");
}

CrossSection cross_section(const RunConfig& cfg) {
    CrossSection cs;
    if (cfg.circle) cs = Circle{*cfg.circle};
    else if (cfg.rect.size() == 2) cs = Rectangle{cfg.rect[0], cfg.rect[1]};
    else if (!cfg.mask_path.empty()) cs = io::read_mask(cfg.mask_path, cfg.h.value_or(0.0));
    else throw std::invalid_argument("no cross section given");
    casimir::validate(cs);
    return cs;
}

ThermalMode thermal_mode(const RunConfig& cfg) {
    if (cfg.zero_t) return ThermalMode::ZeroT;
    if (cfg.classical) return ThermalMode::Classical;
    if (cfg.temperature) return ThermalMode::Temperature;
    if (cfg.beta) return ThermalMode::Beta;
    return ThermalMode::Unset;
}

ThermalState thermal_state(const RunConfig& cfg) {
    if (cfg.beta) return ThermalState::from_beta(*cfg.beta, cfg.hbar, cfg.c);
    if (cfg.temperature) return ThermalState::from_beta(1.0 / (cfg.k_b * *cfg.temperature), cfg.hbar, cfg.c);
    return ThermalState::zero_temperature(cfg.hbar, cfg.c);
}

std::vector<double> separations(const RunConfig& cfg) {
    if (!cfg.L.empty()) return cfg.L;
    if (cfg.L_grid.empty()) return {};
    const double lo = cfg.L_grid[0], hi = cfg.L_grid[1];
    const int n = static_cast<int>(cfg.L_grid[2]);
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(cfg.log_grid ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
    return out;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto cs = cross_section(cfg);
    const auto spec = build_spectrum(cs, cfg.modes, cfg.bc);
    auto prov = base_provenance(cfg, cs);
    prov["spectrum"] = io::spectrum_provenance(spec);
    emit(cfg, render(cfg, io::spectrum_table(spec), prov), out);
    return kOk;
}

int cmd_force(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto cs = cross_section(cfg);
    const auto spec = build_spectrum(cs, cfg.modes, cfg.bc);
    const auto Ls = separations(cfg);
    const double R = reference_length(cs);
    const auto points = sweep(spec, Ls, cfg);

    io::Table table;
    table.columns = {"L", "L_over_R", "force", "force_times_R2", "sigma2", "n_modes", "m_cutoff", "tail_estimate",
                     "spectral_tail", "converged", "regime", "asymptote_near", "asymptote_far"};
    int failures = 0, unconverged = 0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        const auto& p = points[i];
        const auto& r = p.result;
        if (!p.error.empty()) {
            ++failures;
            err << "L = " << io::format_number(Ls[i]) << ": " << p.error << '\n';
        } else if (!r.converged) {
            ++unconverged;
        }
        table.add_row({Ls[i], Ls[i] / R, r.force, r.force * R * R, fluctuation_variance(r.force),
                       static_cast<long>(r.n_modes_used), r.cutoff, r.tail_estimate, r.spectral_tail, r.converged,
                       std::string(to_string(r.regime)), p.near, p.far});
    }
    auto prov = base_provenance(cfg, cs);
    add_thermal(prov, cfg);
    prov["spectrum"] = io::spectrum_provenance(spec);
    emit(cfg, render(cfg, table, prov), out);
    if (failures || unconverged) {
        if (unconverged) {
            err << unconverged << " point(s) exceed --spectral-tol " << io::format_number(cfg.spectral_tol)
                << "; more modes are needed\n";
        }
        return kToleranceUnreachable;
    }
    return kOk;
}

int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto mode = thermal_mode(cfg);
    if (mode == ThermalMode::Temperature || mode == ThermalMode::Beta) {
        throw std::invalid_argument("converge supports --zero-T (default) and --classical");
    }
    const auto cs = cross_section(cfg);
    const double R = reference_length(cs);
    auto Ls = separations(cfg);
    if (Ls.empty()) {
        RunConfig grid = cfg;
        grid.L_grid = {0.05 * R, 5.0 * R, 40.0};
        grid.log_grid = true;
        Ls = separations(grid);
    }

    io::Table table;
    table.columns = {"N", "L", "L_over_R", "force", "force_times_R2", "n_modes", "spectral_tail", "converged",
                     "asymptote_near", "asymptote_far"};
    auto prov = base_provenance(cfg, cs);
    add_thermal(prov, cfg);
    prov["N_list"] = cfg.n_list;
    int failures = 0;
    for (int n : cfg.n_list) {
        const auto spec = build_spectrum(cs, n, cfg.bc);
        const auto points = sweep(spec, Ls, cfg);
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            const auto& p = points[i];
            if (!p.error.empty()) {
                ++failures;
                err << "N = " << n << ", L = " << io::format_number(Ls[i]) << ": " << p.error << '\n';
            }
            table.add_row({static_cast<long>(n), Ls[i], Ls[i] / R, p.result.force, p.result.force * R * R,
                           static_cast<long>(p.result.n_modes_used), p.result.spectral_tail, p.result.converged,
                           p.near, p.far});
        }
    }
    emit(cfg, render(cfg, table, prov), out);
    return failures ? kToleranceUnreachable : kOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    langevin::SamplerConfig sc;
    sc.seed = cfg.seed;
    sc.ds = cfg.ds;
    sc.n_steps = cfg.steps;
    sc.burn_in = cfg.burn_in;
    sc.n_chains = cfg.chains;
    sc.m_max = cfg.m_max;
    sc.threads = cfg.threads;
    std::ostringstream trace;
    if (!cfg.trace_path.empty()) sc.trace = &trace;
    langevin::validate(sc);

    const auto report = langevin::run_calibration(sc);
    io::Table table;
    table.columns = {"check", "estimate", "expected", "std_error", "z", "pass"};
    for (const auto& c : report.checks) table.add_row({c.name, c.estimate, c.expected, c.error, c.z, c.pass});

    if (!cfg.trace_path.empty()) io::write_atomic(cfg.trace_path, trace.str());
    if (!cfg.out.empty()) {
        nlohmann::ordered_json prov;
        prov["program"] = "casimir";
        prov["version"] = kVersion;
        prov["command"] = "sample";
        prov["seed"] = cfg.seed;
        prov["chains"] = cfg.chains;
        prov["steps"] = cfg.steps;
        prov["burn_in"] = cfg.burn_in;
        prov["ds"] = cfg.ds;
        prov["m_max"] = cfg.m_max;
        io::write_atomic(cfg.out, render(cfg, table, prov));
    }
    for (const auto& c : report.checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " estimate=" << io::format_number(c.estimate)
            << " expected=" << io::format_number(c.expected) << " se=" << io::format_number(c.error)
            << " z=" << io::format_number(c.z) << '\n';
    }
    if (!report.all_pass()) {
        err << "sampler calibration failed (|z| > 3)\n";
        return kStatisticalFailure;
    }
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Casimir piston forces from Laplacian spectra", "casimir"};
    app.set_help_flag("--help", "print this help");
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    auto* circle = app.add_option("--circle", cfg.circle, "circular cross section of radius R");
    auto* rect = app.add_option("--rect", cfg.rect, "rectangle with sides A B")->expected(2);
    auto* mask = app.add_option("--mask", cfg.mask_path, "0/1 raster mask file");
    circle->excludes(rect)->excludes(mask);
    rect->excludes(mask);
    app.add_option("--h", cfg.h, "grid spacing of the mask");
    app.add_option("--modes", cfg.modes, "modes per boundary-condition set");
    app.add_option("--bc", cfg.bc, "dirichlet, neumann or both");

    app.add_flag("--zero-T", cfg.zero_t, "quantum force at T = 0 (default)");
    app.add_flag("--classical", cfg.classical, "classical (hbar -> 0) limit; needs --temperature or --beta");
    app.add_option("--temperature", cfg.temperature, "temperature T");
    app.add_option("--beta", cfg.beta, "inverse temperature 1/(kB T)");
    app.add_option("--hbar", cfg.hbar, "Planck constant (default 1)");
    app.add_option("--c", cfg.c, "speed of light (default 1)");
    app.add_option("--kB", cfg.k_b, "Boltzmann constant (default 1)");

    app.add_option("--L", cfg.L, "plate separation(s)")->expected(1, CLI::detail::expected_max_vector_size);
    app.add_option("--L-grid", cfg.L_grid, "MIN MAX COUNT")->expected(3);
    app.add_flag("--log", cfg.log_grid, "logarithmic --L-grid spacing");
    app.add_option("--N-list", cfg.n_list, "modes per set for converge")->expected(1, CLI::detail::expected_max_vector_size);
    app.add_option("--tol", cfg.tol, "relative tolerance of the Matsubara and image sums");
    app.add_option("--spectral-tol", cfg.spectral_tol, "accepted relative size of the missing-mode estimate");

    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--chains", cfg.chains, "independent chains");
    app.add_option("--steps", cfg.steps, "steps per chain, burn-in included");
    app.add_option("--burn-in", cfg.burn_in, "discarded steps per chain");
    app.add_option("--ds", cfg.ds, "pseudo-time step in units of 1/kappa_min");
    app.add_option("--m-max", cfg.m_max, "Matsubara channels |m| <= m-max");
    app.add_option("--trace", cfg.trace_path, "write the chain-0 trajectory of the first suite");

    app.add_option("--threads", cfg.threads, "worker threads; output does not depend on it");
    app.add_option("--out", cfg.out, "output file (default: standard output)");
    app.add_option("--format", cfg.format, "csv or json");

    app.add_subcommand("spectrum", "combined transverse spectrum");
    app.add_subcommand("force", "force curve over plate separations");
    app.add_subcommand("converge", "force curves for several mode counts with both asymptotes");
    app.add_subcommand("sample", "Langevin sampler calibration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        validate(cfg);
        if (cfg.command == "spectrum") return cmd_spectrum(cfg, out, err);
        if (cfg.command == "force") return cmd_force(cfg, out, err);
        if (cfg.command == "converge") return cmd_converge(cfg, out, err);
        return cmd_sample(cfg, out, err);
    } catch (const io::IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ToleranceError& e) {
        err << "error: " << e.what() << '\n';
        return kToleranceUnreachable;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv = {"casimir"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace casimir::cli
