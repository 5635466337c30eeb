#include "killing_lab/cli.hpp"

#include "killing_lab/albert.hpp"
#include "killing_lab/space_catalog.hpp"
#include "killing_lab/taylor_flow.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace kl {

namespace {

constexpr const char* kEmbeddedOp2 = "op2-embedded";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write output file: " + cfg.out);
    f << text;
}

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The system whose nullspace the commands operate on.
std::unique_ptr<LinearSystem> select_system(const SymmetricSpaceModel& space, const RunConfig& cfg) {
    if (cfg.rank1_shortcut) return std::make_unique<LinearSystem>(build_rank1_system(space, cfg.d));
    if (cfg.d == 2) {
        const bool eq22 = cfg.include_eq22 < 0 ? !space.rank_one : cfg.include_eq22 > 0;
        return std::make_unique<LinearSystem>(build_quadratic_system(space, eq22));
    }
    return std::make_unique<LinearSystem>(build_topslot_system(space, cfg.d));
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions o;
    o.primes = cfg.primes;
    o.seed = cfg.seed;
    return o;
}

// Scales K so its largest coefficient has absolute value 1.
SymTensorRankD normalized(const SymTensorRankD& K) {
    Rat m(0);
    for (const auto& [k, v] : K.coeffs) m = std::max(m, abs(v));
    if (m.is_zero()) return K;
    return K.scaled(Rat(1) / m);
}

std::vector<double> gaussian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
    const auto entries = catalog();
    std::ostringstream os;
    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : entries)
            arr.push_back({{"id", e.id}, {"n", e.n}, {"rank", e.rank}, {"isotropy_dim", e.isotropy_dim}, {"note", e.note}});
        arr.push_back({{"id", kEmbeddedOp2}, {"n", 16}, {"rank", 1}, {"isotropy_dim", 36},
                       {"note", "verify only: Cayley plane inside the Albert algebra"}});
        os << nlohmann::json({{"schema", kReportSchema}, {"spaces", arr}}).dump(2) << '\n';
    } else {
        os << std::left << std::setw(14) << "id" << std::setw(5) << "n" << std::setw(6) << "rank" << std::setw(14)
           << "isotropy_dim"
           << "note\n";
        auto row = [&](const std::string& id, const std::string& n, int rank, const std::string& iso,
                       const std::string& note) {
            os << std::left << std::setw(14) << id << std::setw(5) << n << std::setw(6) << rank << std::setw(14) << iso
               << note << '\n';
        };
        for (const auto& e : entries) {
            const bool generic = e.n == 0;
            row(e.id, generic ? "-" : std::to_string(e.n), e.rank, generic ? "-" : std::to_string(e.isotropy_dim),
                e.note);
        }
        row(kEmbeddedOp2, "16", 1, "36", "verify only: Cayley plane inside the Albert algebra");
    }
    write_output(cfg, os.str(), out);
    return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.space == kEmbeddedOp2) throw UsageError("solve: op2-embedded is a verify-only mode; use --space op2");
    const SymmetricSpaceModel space = make_space(cfg.space);
    ReportOptions opt;
    opt.d = cfg.d;
    opt.include_eq22 = cfg.include_eq22;
    opt.rank1_shortcut = cfg.rank1_shortcut;
    opt.solve = solve_options(cfg);
    SystemSolution sol;
    std::unique_ptr<LinearSystem> sys;
    const auto t0 = std::chrono::steady_clock::now();
    SolutionReport rep = indecomposability_report(space, opt, &sol, &sys);
    rep.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.export_basis.empty()) {
        if (cfg.d != 2) throw UsageError("--export-basis: the exchange format holds rank-2 tensors");
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& K : solution_tensors(*sys, sol)) arr.push_back(to_json(K));
        std::ofstream f(cfg.export_basis);
        if (!f) throw std::invalid_argument("cannot write " + cfg.export_basis);
        f << arr.dump() << '\n';
    }
    const std::string text =
        cfg.format == "csv" ? report_to_csv(rep, cfg, cfg.timing) : report_to_json(rep, cfg, cfg.timing).dump(2) + "\n";
    write_output(cfg, text, out);
    (void)err;
    return kExitOk;
}

int cmd_export(const RunConfig& cfg, std::ostream& out) {
    if (cfg.d != 2) throw UsageError("export: the exchange format holds rank-2 tensors");
    const SymmetricSpaceModel space = make_space(cfg.space);
    auto sys = select_system(space, cfg);
    const SystemSolution sol = solve(*sys, solve_options(cfg));
    if (cfg.index < 0 || cfg.index >= sol.dim())
        throw UsageError("export: --index out of range (solution dimension " + std::to_string(sol.dim()) + ")");
    SymTensorRankD K = solution_tensors(*sys, sol)[cfg.index];
    if (!cfg.perturb.empty()) {
        const Rat eps = Rat::parse(cfg.perturb);
        K.add(0, 0, eps);
    }
    write_output(cfg, to_json(K).dump() + "\n", out);
    return kExitOk;
}

struct TensorCase {
    std::string label;
    SymTensorRankD K;
};

int verify_embedded(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.ka_random) throw UsageError("verify: op2-embedded checks random K_A; pass --ka-random");
    if (!cfg.tensor.empty() || !cfg.from_nullspace.empty())
        throw UsageError("verify: op2-embedded does not take --tensor or --from-nullspace");
    const double s_max = cfg.s_max > 0 ? cfg.s_max : std::numbers::pi;
    const int steps = cfg.steps > 0 ? cfg.steps : 1000;
    nlohmann::json runs = nlohmann::json::array();
    double worst = 0.0, worst_speed = 0.0, worst_constraint = 0.0;
    std::string trajectory;
    for (int g = 0; g < cfg.geodesics; ++g) {
        std::mt19937_64 rng(cfg.seed + 1000003ULL * static_cast<uint64_t>(g));
        AlbertD A = random_traceless(rng(), false);
        A *= 1.0 / std::sqrt(inner(A, A));
        const AlbertD X0 = random_cayley_point(rng());
        const AlbertD V0 = random_unit_tangent(X0, rng());
        GeodesicCheck gc;
        try {
            gc = embedded_geodesic_check(A, X0, V0, s_max, steps);
        } catch (const ConstraintDrift& e) {
            err << "verify: geodesic " << g << ": " << e.what() << '\n';
            return kExitFailure;
        }
        worst = std::max(worst, gc.max_deviation);
        worst_speed = std::max(worst_speed, gc.speed_drift);
        worst_constraint = std::max(worst_constraint, gc.max_constraint);
        runs.push_back({{"geodesic", g}, {"max_deviation", gc.max_deviation}, {"speed_drift", gc.speed_drift}});
        if (g == 0 && !cfg.trajectory.empty()) {
            std::ostringstream os;
            os << std::setprecision(17) << "s,value\n";
            for (std::size_t i = 0; i < gc.s.size(); ++i) os << gc.s[i] << ',' << gc.value[i] << '\n';
            trajectory = os.str();
        }
    }
    if (!cfg.trajectory.empty()) {
        std::ofstream f(cfg.trajectory);
        f << trajectory;
    }
    const bool pass = worst <= cfg.tol;
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << std::setprecision(17) << "geodesic,max_deviation,speed_drift\n";
        for (const auto& r : runs) os << r["geodesic"] << ',' << r["max_deviation"] << ',' << r["speed_drift"] << '\n';
    } else {
        nlohmann::json j = {{"schema", kReportSchema},
                            {"command", "verify"},
                            {"space", cfg.space},
                            {"mode", "embedded"},
                            {"family", "K_A(Y,Z) = phi(Y,Z,A), Tr A = 0, |A| = 1"},
                            {"geodesics", cfg.geodesics},
                            {"s_max", s_max},
                            {"steps", steps},
                            {"tol", cfg.tol},
                            {"max_deviation", worst},
                            {"max_speed_drift", worst_speed},
                            {"max_constraint_residual", worst_constraint},
                            {"pass", pass},
                            {"seed", cfg.seed},
                            {"input_hash", content_hash(input_descriptor(cfg).dump())},
                            {"runs", runs}};
        os << j.dump(2) << '\n';
    }
    write_output(cfg, os.str(), out);
    if (!pass) err << "verify: max deviation " << worst << " exceeds tolerance " << cfg.tol << '\n';
    return pass ? kExitOk : kExitFailure;
}

int verify_normal(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const SymmetricSpaceModel space = make_space(cfg.space);
    if (!space.rank_one || !space.normalized)
        throw UsageError("verify: normal-coordinate flow needs a normalized rank-one space (sphere, cpm, hpm), got " +
                         space.name);
    std::vector<TensorCase> cases;
    if (!cfg.tensor.empty()) {
        SymTensorRankD K = sym_pair_from_json(nlohmann::json::parse(read_file(cfg.tensor)));
        if (K.n != space.n)
            throw UsageError("verify: tensor dimension " + std::to_string(K.n) + " does not match space dimension " +
                             std::to_string(space.n));
        cases.push_back({cfg.tensor, K});
    }
    if (!cfg.from_nullspace.empty()) {
        auto sys = select_system(space, cfg);
        const SystemSolution sol = solve(*sys, solve_options(cfg));
        const auto tensors = solution_tensors(*sys, sol);
        if (cfg.from_nullspace == "all") {
            for (std::size_t i = 0; i < tensors.size(); ++i) cases.push_back({"nullspace:" + std::to_string(i), tensors[i]});
        } else {
            int idx = -1;
            try {
                idx = std::stoi(cfg.from_nullspace);
            } catch (const std::exception&) {
                throw UsageError("verify: --from-nullspace takes an index or \"all\"");
            }
            if (idx < 0 || idx >= static_cast<int>(tensors.size()))
                throw UsageError("verify: --from-nullspace index out of range (solution dimension " +
                                 std::to_string(tensors.size()) + ")");
            cases.push_back({"nullspace:" + cfg.from_nullspace, tensors[idx]});
        }
    }
    if (cases.empty()) throw UsageError("verify: pass --tensor FILE or --from-nullspace INDEX");

    const double s_max = cfg.s_max > 0 ? cfg.s_max : 1.0;
    const int steps = cfg.steps > 0 ? cfg.steps : 100;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> starts;
    for (int g = 0; g < cfg.geodesics; ++g) {
        std::mt19937_64 rng(cfg.seed + 1000003ULL * static_cast<uint64_t>(g));
        std::uniform_real_distribution<double> u(0.0, 0.25);
        std::vector<double> X = gaussian(rng, space.n), P = gaussian(rng, space.n);
        const double r = u(rng) / norm(X), p = 1.0 / norm(P);
        for (auto& x : X) x *= r;
        for (auto& x : P) x *= p;
        starts.emplace_back(X, P);
    }

    FlowSeries fs(space);
    nlohmann::json results = nlohmann::json::array();
    double worst = 0.0, worst_energy = 0.0;
    bool recursion_ok = true;
    std::string trajectory;
    for (const auto& c : cases) {
        const SymTensorRankD K = normalized(c.K);
        const PolyXP poly = K.to_poly();
        double dev = 0.0, energy = 0.0;
        for (std::size_t g = 0; g < starts.size(); ++g) {
            const bool keep = g == 0 && &c == &cases.front() && !cfg.trajectory.empty();
            FlowCheck fc;
            try {
                fc = integrate_and_check(space, poly, starts[g].first, starts[g].second, s_max, steps, 1e-14, keep);
            } catch (const ChartExit& e) {
                err << "verify: " << c.label << ", geodesic " << g << ": " << e.what() << " at s = " << e.s_exit << '\n';
                return kExitFailure;
            }
            dev = std::max(dev, fc.max_deviation);
            energy = std::max(energy, fc.energy_drift);
            if (keep) trajectory = trajectory_csv(fc);
        }
        nlohmann::json r = {{"tensor", c.label}, {"max_deviation", dev}, {"energy_drift", energy}};
        if (cfg.order >= 0) {
            const RecursionResult rr = killing_recursion_check(fs, top_slot_series(K), cfg.order);
            r["recursion_ok"] = rr.ok;
            r["recursion_order"] = rr.checked_order;
            recursion_ok = recursion_ok && rr.ok;
        }
        results.push_back(r);
        worst = std::max(worst, dev);
        worst_energy = std::max(worst_energy, energy);
    }
    if (!cfg.trajectory.empty()) {
        std::ofstream f(cfg.trajectory);
        f << trajectory;
    }
    const bool pass = worst <= cfg.tol && recursion_ok;
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << std::setprecision(17) << "tensor,max_deviation,energy_drift\n";
        for (const auto& r : results)
            os << r["tensor"].get<std::string>() << ',' << r["max_deviation"] << ',' << r["energy_drift"] << '\n';
    } else {
        nlohmann::json j = {{"schema", kReportSchema},
                            {"command", "verify"},
                            {"space", space.name},
                            {"mode", "normal-coordinates"},
                            {"d", cfg.d},
                            {"scale_factor", space.scale.str()},
                            {"geodesics", cfg.geodesics},
                            {"s_max", s_max},
                            {"steps", steps},
                            {"tol", cfg.tol},
                            {"normalization", "max |coefficient| = 1"},
                            {"max_deviation", worst},
                            {"max_energy_drift", worst_energy},
                            {"pass", pass},
                            {"seed", cfg.seed},
                            {"input_hash", content_hash(input_descriptor(cfg).dump())},
                            {"tensors", results}};
        os << j.dump(2) << '\n';
    }
    write_output(cfg, os.str(), out);
    if (!pass) {
        if (worst > cfg.tol) err << "verify: max deviation " << worst << " exceeds tolerance " << cfg.tol << '\n';
        if (!recursion_ok) err << "verify: recursion check failed\n";
    }
    return pass ? kExitOk : kExitFailure;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.space == kEmbeddedOp2) return verify_embedded(cfg, out, err);
    if (cfg.ka_random) throw UsageError("verify: --ka-random needs --space op2-embedded");
    return verify_normal(cfg, out, err);
}

}  // namespace

std::string content_hash(const std::string& data) {
    const std::string blob = "blob " + std::to_string(data.size()) + '\0' + data;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("content_hash: SHA-1 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

nlohmann::json input_descriptor(const RunConfig& cfg) {
    nlohmann::json j = {{"command", cfg.command},
                        {"space", cfg.space},
                        {"d", cfg.d},
                        {"include_eq22", cfg.include_eq22},
                        {"rank1_shortcut", cfg.rank1_shortcut},
                        {"primes", cfg.primes},
                        {"seed", cfg.seed}};
    if (cfg.space.rfind("file:", 0) == 0) j["space_source"] = read_file(cfg.space.substr(5));
    if (cfg.command == "verify") {
        j["tol"] = cfg.tol;
        j["order"] = cfg.order;
        j["geodesics"] = cfg.geodesics;
        j["steps"] = cfg.steps;
        j["s_max"] = cfg.s_max;
        j["from_nullspace"] = cfg.from_nullspace;
        j["ka_random"] = cfg.ka_random;
        if (!cfg.tensor.empty()) j["tensor_source"] = read_file(cfg.tensor);
    }
    return j;
}

nlohmann::json report_to_json(const SolutionReport& rep, const RunConfig& cfg, bool with_elapsed) {
    nlohmann::json j = {{"schema", kReportSchema},
                        {"command", "solve"},
                        {"space", rep.space_name},
                        {"n", rep.n},
                        {"d", rep.d},
                        {"unknown_dim", rep.unknown_dim},
                        {"row_count", rep.row_count},
                        {"system_rank", rep.system_rank},
                        {"solution_dim", rep.solution_dim},
                        {"decomposable_dim", rep.decomposable_dim},
                        {"indecomposable_dim", rep.indecomposable_dim},
                        {"scale_factor", rep.scale_factor.str()},
                        {"arithmetic_mode", rep.arithmetic_mode},
                        {"include_eq22", rep.include_eq22},
                        {"rank1_shortcut", rep.rank1_shortcut},
                        {"decomposables_verified", rep.decomposables_verified},
                        {"blocks", rep.blocks},
                        {"primes_used", rep.primes_used},
                        {"float_rank", rep.float_rank},
                        {"seed", rep.seed},
                        {"input_hash", content_hash(input_descriptor(cfg).dump())}};
    if (with_elapsed) j["elapsed"] = rep.elapsed;
    return j;
}

std::string report_to_csv(const SolutionReport& rep, const RunConfig& cfg, bool with_elapsed) {
    std::ostringstream os;
    os << "space,n,d,unknown_dim,row_count,system_rank,solution_dim,decomposable_dim,indecomposable_dim,"
          "scale_factor,include_eq22,rank1_shortcut,seed,input_hash";
    if (with_elapsed) os << ",elapsed";
    os << '\n'
       << rep.space_name << ',' << rep.n << ',' << rep.d << ',' << rep.unknown_dim << ',' << rep.row_count << ','
       << rep.system_rank << ',' << rep.solution_dim << ',' << rep.decomposable_dim << ',' << rep.indecomposable_dim
       << ',' << rep.scale_factor.str() << ',' << rep.include_eq22 << ',' << rep.rank1_shortcut << ',' << rep.seed
       << ',' << content_hash(input_descriptor(cfg).dump());
    if (with_elapsed) os << ',' << rep.elapsed;
    os << '\n';
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic and top-slot Killing tensors on symmetric spaces"};
    app.require_subcommand(1);
    RunConfig cfg;
    bool eq22_on = false, eq22_off = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--space", cfg.space, "space id, see `catalog`")->required();
        sub->add_option("--rank", cfg.d, "tensor rank d")->check(CLI::Range(1, 6));
        sub->add_flag("--include-eq22", eq22_on, "add the (4,4) identity to the quadratic system");
        sub->add_flag("--no-eq22", eq22_off, "omit the (4,4) identity");
        sub->add_flag("--rank1-shortcut", cfg.rank1_shortcut, "use the two rank-one identities");
        sub->add_option("--primes", cfg.primes, "initial number of moduli")->check(CLI::Range(2, 64));
        sub->add_option("--seed", cfg.seed, "prime, sketch and geodesic seed");
        sub->add_option("--out", cfg.out, "write the report to a file");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* solve_cmd = app.add_subcommand("solve", "solution, decomposable and indecomposable dimensions");
    add_common(solve_cmd);
    solve_cmd->add_flag("--timing", cfg.timing, "include elapsed seconds (reports are no longer byte-identical)");
    solve_cmd->add_option("--export-basis", cfg.export_basis, "write the nullspace basis (rank 2) as JSON");

    auto* verify_cmd = app.add_subcommand("verify", "conservation of Killing tensors along random geodesics");
    add_common(verify_cmd);
    verify_cmd->add_option("--from-nullspace", cfg.from_nullspace, "nullspace index or \"all\"");
    verify_cmd->add_option("--tensor", cfg.tensor, "tensor file in the exchange format");
    verify_cmd->add_flag("--ka-random", cfg.ka_random, "random K_A on op2-embedded");
    verify_cmd->add_option("--geodesics", cfg.geodesics, "number of random geodesics")->check(CLI::Range(1, 100000));
    verify_cmd->add_option("--tol", cfg.tol, "deviation tolerance")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--order", cfg.order, "also run the exact recursion check through this order")
        ->check(CLI::Range(0, 64));
    verify_cmd->add_option("--steps", cfg.steps, "observation points (normal) or RK4 steps (embedded)")
        ->check(CLI::Range(1, 10000000));
    verify_cmd->add_option("--s-max", cfg.s_max, "geodesic length")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--trajectory", cfg.trajectory, "CSV dump of the first geodesic");

    auto* export_cmd = app.add_subcommand("export", "write one nullspace tensor in the exchange format");
    add_common(export_cmd);
    export_cmd->add_option("--index", cfg.index, "basis index")->check(CLI::NonNegativeNumber);
    export_cmd->add_option("--perturb", cfg.perturb, "add p/q to the X0X0P0P0 coefficient");

    auto* catalog_cmd = app.add_subcommand("catalog", "list the available spaces");
    catalog_cmd->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    catalog_cmd->add_option("--out", cfg.out, "write to a file");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "killing-lab: " << e.what() << '\n';
        return kExitUsage;
    }
    if (eq22_on && eq22_off) {
        err << "killing-lab: --include-eq22 and --no-eq22 are exclusive\n";
        return kExitUsage;
    }
    cfg.include_eq22 = eq22_on ? 1 : eq22_off ? 0 : -1;

    try {
        if (catalog_cmd->parsed()) {
            cfg.command = "catalog";
            if (cfg.format == "json" && !catalog_cmd->count("--format")) cfg.format = "text";
            return cmd_catalog(cfg, out);
        }
        if (solve_cmd->parsed()) {
            cfg.command = "solve";
            return cmd_solve(cfg, out, err);
        }
        if (export_cmd->parsed()) {
            cfg.command = "export";
            return cmd_export(cfg, out);
        }
        cfg.command = "verify";
        return cmd_verify(cfg, out, err);
    } catch (const CertificationError& e) {
        err << "killing-lab: certification failure: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::invalid_argument& e) {
        err << "killing-lab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "killing-lab: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace kl
