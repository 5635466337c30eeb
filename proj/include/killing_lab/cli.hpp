#pragma once

#include "killing_lab/killing_system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kl {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;  // certification failure, or a verification above tolerance

constexpr int kReportSchema = 1;

struct RunConfig {
    std::string command;
    std::string space;
    int d = 2;
    int include_eq22 = -1;  // -1: default for the space
    bool rank1_shortcut = false;
    int primes = 3;
    uint64_t seed = 20240901;
    double tol = 1e-8;
    int order = -1;  // recursion check order in verify; -1 skips it
    int geodesics = 20;
    int steps = 0;   // 0: command default
    double s_max = 0.0;  // 0: command default
    std::string out;
    std::string format = "json";
    std::string from_nullspace;  // index or "all"
    std::string tensor;
    bool ka_random = false;
    bool timing = false;
    int index = 0;
    std::string perturb;
    std::string trajectory;
    std::string export_basis;
};

// SHA-1 of "blob <size>\0<data>", hex encoded.
std::string content_hash(const std::string& data);

// Canonical description of the inputs of a run (space definition and flags).
nlohmann::json input_descriptor(const RunConfig& cfg);

nlohmann::json report_to_json(const SolutionReport& rep, const RunConfig& cfg, bool with_elapsed);
std::string report_to_csv(const SolutionReport& rep, const RunConfig& cfg, bool with_elapsed);

// Parses and runs one command line; returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kl
