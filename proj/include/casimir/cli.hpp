#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "casimir/force.hpp"
#include "casimir/spectrum.hpp"

namespace casimir::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kConfigError = 2,
    kIoError = 3,
    kToleranceUnreachable = 4,
    kStatisticalFailure = 5,
};

enum class ThermalMode { Unset, ZeroT, Classical, Temperature, Beta };

struct RunConfig {
    std::string command;

    std::optional<double> circle;
    std::vector<double> rect;
    std::string mask_path;
    std::optional<double> h;
    int modes = 100;
    std::string bc = "both";

    bool zero_t = false;
    bool classical = false;
    std::optional<double> temperature;
    std::optional<double> beta;
    double hbar = 1.0;
    double c = 1.0;
    double k_b = 1.0;

    std::vector<double> L;
    std::vector<double> L_grid;  // min, max, count
    bool log_grid = false;
    std::vector<int> n_list = {10, 100, 1000};

    double tol = 1e-10;
    double spectral_tol = 1e-3;

    std::uint64_t seed = 42;
    int chains = 4;
    long steps = 50'000;
    long burn_in = 1'000;
    double ds = 0.5;
    long m_max = 4;
    std::string trace_path;

    unsigned threads = 1;
    std::string out;
    std::string format = "csv";
};

/// Throws std::invalid_argument on inconsistent settings.
void validate(const RunConfig& cfg);
CrossSection cross_section(const RunConfig& cfg);
ThermalMode thermal_mode(const RunConfig& cfg);
ThermalState thermal_state(const RunConfig& cfg);
/// Plate separations from --L or --L-grid, in input order.
std::vector<double> separations(const RunConfig& cfg);

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_force(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace casimir::cli
