// Acceptance runner: one PASS/FAIL line per criterion.

#include "killing_lab/albert.hpp"
#include "killing_lab/cli.hpp"
#include "killing_lab/hpm_constructions.hpp"
#include "killing_lab/killing_system.hpp"
#include "killing_lab/space_catalog.hpp"
#include "killing_lab/taylor_flow.hpp"
#include "killing_lab/tensor_core.hpp"

#include "../tests/oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace kl;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Solved {
    SolutionReport rep;
    std::vector<SymTensorRankD> tensors;
};

Solved solve_space(const std::string& id, const ReportOptions& opt = {}) {
    const auto M = make_space(id);
    SystemSolution sol;
    std::unique_ptr<LinearSystem> sys;
    Solved s;
    s.rep = indecomposability_report(M, opt, &sol, &sys);
    s.tensors = solution_tensors(*sys, sol);
    return s;
}

std::string dims(const SolutionReport& r) {
    std::ostringstream os;
    os << "unknown=" << r.unknown_dim << " solution=" << r.solution_dim << " decomposable=" << r.decomposable_dim
       << " indecomposable=" << r.indecomposable_dim;
    return os.str();
}

Outcome op2_headline() {
    const auto t0 = Clock::now();
    const auto r = indecomposability_report(make_space("op2"));
    const double t = seconds_since(t0);
    const bool ok = r.unknown_dim == 5440 && r.solution_dim == 676 && r.decomposable_dim == 666 &&
                    r.indecomposable_dim == 10 && t <= 1800.0;
    std::ostringstream os;
    os << dims(r) << " time=" << t << "s";
    return {ok, os.str()};
}

Outcome hp2_decomposable() {
    const auto t0 = Clock::now();
    const auto r = indecomposability_report(make_space("hpm:2"));
    const double t = seconds_since(t0);
    std::ostringstream os;
    os << dims(r) << " time=" << t << "s";
    return {r.solution_dim == r.decomposable_dim && t <= 60.0, os.str()};
}

Outcome hp3_indecomposables() {
    const auto s = solve_space("hpm:3");
    const auto M = make_space("hpm:3");
    const auto sys = build_quadratic_system(M, false);
    std::vector<SymTensorRankD> all = s.tensors;
    std::vector<SymTensorRankD> fam_i;
    std::map<std::string, int> counts;
    bool members = true;
    for (const auto& g : topslot_generators(3)) {
        members = members && membership(g.K, sys);
        all.push_back(g.K);
        if (g.family == "i") fam_i.push_back(g.K);
        ++counts[g.family];
    }
    std::vector<SymTensorRankD> gens(all.begin() + static_cast<long>(s.tensors.size()), all.end());
    const int joint = tensor_span_rank(all);
    const int gen_rank = tensor_span_rank(gens);
    const int i_rank = tensor_span_rank(fam_i);
    std::ostringstream os;
    os << dims(s.rep) << " span(nullspace+families)=" << joint << " span(families)=" << gen_rank
       << " span(i)=" << i_rank << " generators=";
    for (const auto& [f, c] : counts) os << f << ":" << c << " ";
    const bool ok = s.rep.indecomposable_dim > 0 && joint == s.rep.solution_dim && gen_rank == s.rep.solution_dim &&
                    i_rank < s.rep.solution_dim && members;
    return {ok, os.str()};
}

Outcome cp2_s3_decomposable() {
    std::ostringstream os;
    bool ok = true;
    for (const char* id : {"cpm:2", "sphere:3"}) {
        const auto r = indecomposability_report(make_space(id));
        ok = ok && r.indecomposable_dim == 0;
        os << id << ": " << dims(r) << "; ";
    }
    return {ok, os.str()};
}

Outcome rank1_equivalence() {
    std::ostringstream os;
    bool ok = true;
    for (const char* id : {"cpm:2", "hpm:2"})
        for (int d : {2, 3}) {
            const auto M = make_space(id);
            const auto r1 = build_rank1_system(M, d);
            const auto ts = build_topslot_system(M, d);
            const auto s1 = solve(r1), st = solve(ts);
            bool mutual = s1.dim() == st.dim();
            for (const auto& K : solution_tensors(r1, s1)) mutual = mutual && membership(K, ts);
            for (const auto& K : solution_tensors(ts, st)) mutual = mutual && membership(K, r1);
            ok = ok && mutual;
            os << id << " d=" << d << ": " << s1.dim() << "/" << st.dim() << (mutual ? "" : " MISMATCH") << "; ";
        }
    return {ok, os.str()};
}

Outcome eq22_redundancy() {
    std::ostringstream os;
    bool ok = true;
    for (const char* id : {"cpm:2", "hpm:2"}) {
        const auto M = make_space(id);
        const int with = solve(build_quadratic_system(M, true)).dim();
        const int without = solve(build_quadratic_system(M, false)).dim();
        ok = ok && with == without;
        os << id << ": " << with << " vs " << without << "; ";
    }
    return {ok, os.str()};
}

Outcome series_constants() {
    const bool ok = bernoulli_c(0) == Rat(1, 2) && bernoulli_c(1) == Rat(1, 6) && bernoulli_c(2) == Rat(1, 30) &&
                    metric_coeff(1) == Rat(-1, 3) && metric_coeff(2) == Rat(2, 45) && odd_field_coeff(0) == Rat(1) &&
                    odd_field_coeff(1) == Rat(-1, 3) && odd_field_coeff(2) == Rat(-1, 45);
    std::ostringstream os;
    os << "c=" << bernoulli_c(0).str() << "," << bernoulli_c(1).str() << "," << bernoulli_c(2).str()
       << " metric=" << metric_coeff(1).str() << "," << metric_coeff(2).str() << " odd=" << odd_field_coeff(0).str()
       << "," << odd_field_coeff(1).str() << "," << odd_field_coeff(2).str();
    return {ok, os.str()};
}

Outcome recursion_single_term() {
    std::ostringstream os;
    bool ok = true;
    int checked = 0;
    for (const auto& e : catalog()) {
        if (e.n == 0 || e.n > 8) continue;
        const auto M = make_space(e.id);
        FlowSeries fs(M);
        for (int d : {2, 3}) {
            if (d == 3 && M.n > 4) continue;
            const auto sys = build_topslot_system(M, d);
            const auto Ks = solution_tensors(sys, solve(sys));
            int bad = 0;
            for (const auto& K : Ks) {
                const auto r = killing_recursion_check(fs, top_slot_series(K), d + 6);
                bad += !r.ok;
                ++checked;
            }
            ok = ok && bad == 0;
            os << e.id << " d=" << d << ": " << Ks.size() - bad << "/" << Ks.size() << "; ";
        }
    }
    os << "tensors=" << checked;
    return {ok, os.str()};
}

nlohmann::json cli_json(const std::vector<std::string>& args, int& code) {
    std::ostringstream out, err;
    code = run_cli(args, out, err);
    return nlohmann::json::parse(out.str());
}

Outcome conservation() {
    std::ostringstream os;
    bool ok = true;
    int code = 0;
    for (const char* id : {"cpm:2", "hpm:2"}) {
        const auto j = cli_json({"verify", "--space", id, "--from-nullspace", "all", "--geodesics", "20", "--s-max", "1"},
                                code);
        const double dev = j["max_deviation"];
        ok = ok && code == kExitOk && dev <= 1e-8;
        os << id << " (" << j["tensors"].size() << " tensors): " << dev << "; ";
    }
    const auto e = cli_json({"verify", "--space", "op2-embedded", "--ka-random", "--geodesics", "10"}, code);
    const double edev = e["max_deviation"];
    ok = ok && code == kExitOk && edev <= 1e-8;
    os << "op2-embedded K_A: " << edev << "; ";
    const auto tmp = (std::filesystem::temp_directory_path() / "kl_acceptance_perturbed.json").string();
    {
        std::ostringstream out, err;
        run_cli({"export", "--space", "hpm:2", "--index", "0", "--perturb", "1/10", "--out", tmp}, out, err);
    }
    const auto n = cli_json({"verify", "--space", "hpm:2", "--tensor", tmp, "--geodesics", "20"}, code);
    std::filesystem::remove(tmp);
    const double ndev = n["max_deviation"];
    ok = ok && code == kExitFailure && ndev > 1e-4;
    os << "perturbed: " << ndev;
    return {ok, os.str()};
}

Outcome duality() {
    const auto M = make_space("cpm:2");
    const auto N = M.negated();
    FlowSeries fs(M), fn(N);
    std::vector<KillingSeries> samples;
    samples.push_back(series_from_poly(killing_vector_even(M, M.isotropy_gens[0]), 1, 1));
    samples.push_back(odd_field_series(fs, Vec{Rat(1), Rat(0), Rat(-1), Rat(2)}, 7));
    samples.push_back(series_product(samples[0], samples[1]));
    const auto sys = build_quadratic_system(M, true);
    const auto Ks = solution_tensors(sys, solve(sys));
    samples.push_back(top_slot_series(Ks.at(0)));
    samples.push_back(series_product(samples[1], odd_field_series(fs, Vec{Rat(0), Rat(1), Rat(1), Rat(0)}, 7)));
    std::ostringstream os;
    bool ok = true;
    for (size_t i = 0; i < samples.size(); ++i) {
        const bool orig = killing_recursion_check(fs, samples[i], 6).ok;
        const bool dual = killing_recursion_check(fn, dualize(samples[i]), 6).ok;
        ok = ok && orig && dual;
        os << "sample " << i << ": " << (dual ? "ok" : "fail") << "; ";
    }
    return {ok, os.str()};
}

Outcome property_suites() {
    const auto t0 = Clock::now();
    std::ostringstream os;
    bool all = true;
    auto report = [&](const std::string& name, bool ok) {
        all = all && ok;
        os << name << "=" << (ok ? "ok" : "FAIL") << " ";
    };

    bool curv = true;
    for (const char* id : {"sphere:3", "cpm:2", "cpm:3", "hpm:1", "hpm:2", "hpm:3", "op2"}) {
        const auto M = make_space(id);
        const int n = M.n;
        for (int a = 0; a < n && curv; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        const int64_t v = M.r(a, b, c, d);
                        curv = curv && v == -M.r(b, a, c, d) && v == -M.r(a, b, d, c) && v == M.r(c, d, a, b) &&
                               v + M.r(b, c, a, d) + M.r(c, a, b, d) == 0;
                    }
    }
    report("curvature_symmetries", curv);

    const auto C = clifford_system16();
    bool cliff = true;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            auto s = mat_mul(C.S[i], C.S[j], 16);
            const auto t = mat_mul(C.S[j], C.S[i], 16);
            for (int k = 0; k < 256; ++k) {
                const int64_t expect = (i == j && k % 17 == 0) ? 2 : 0;
                cliff = cliff && s[k] + t[k] == expect;
            }
        }
    report("clifford", cliff);

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> u(-6, 6);
    bool norm = true;
    for (int t = 0; t < 500; ++t) {
        Oct<Rat> a, b;
        for (auto& v : a) v = Rat(u(rng), 1 + (u(rng) + 6) % 4);
        for (auto& v : b) v = Rat(u(rng), 1 + (u(rng) + 6) % 4);
        norm = norm && oct_norm2(oct_mul(a, b)) == oct_norm2(a) * oct_norm2(b);
    }
    report("octonion_norm", norm);

    // S_{a',b'} S_{a,b} T = 0 implies S_{a,b} T = 0 for b <= a' <= a, as a rank equality.
    bool young = true;
    for (int n = 2; n <= 3; ++n)
        for (auto [a, b] : {std::pair{3, 1}, std::pair{2, 2}, std::pair{2, 1}}) {
            const int slots = a + b;
            int size = 1;
            for (int s = 0; s < slots; ++s) size *= n;
            auto rank_of_map = [&](const std::function<DenseTensor(const DenseTensor&)>& f) {
                std::vector<std::vector<Rat>> cols;
                for (int o = 0; o < size; ++o) {
                    DenseTensor e(n, slots);
                    e.data[o] = Rat(1);
                    cols.push_back(f(e).data);
                }
                return testing::bareiss_rank(cols);
            };
            const int base = rank_of_map([&](const DenseTensor& t) { return symmetrize(t, a, b); });
            for (int ap = b; ap <= a; ++ap) {
                const int comp = rank_of_map(
                    [&](const DenseTensor& t) { return symmetrize(symmetrize(t, a, b), ap, slots - ap); });
                young = young && comp == base;
            }
        }
    report("young_lemma", young);

    bool jac = true;
    std::uniform_int_distribution<int> var(0, 2), ex(0, 2), co(-3, 3);
    auto rnd = [&] {
        PolyXP f(3);
        for (int t = 0; t < 4; ++t) {
            Mono m = Mono::x(var(rng), ex(rng)) * Mono::p(var(rng), ex(rng)) * Mono::x(var(rng), ex(rng));
            f.add_term(m, Rat(co(rng)));
        }
        return f;
    };
    for (int t = 0; t < 20; ++t) {
        const auto f = rnd(), g = rnd(), h = rnd();
        jac = jac && (poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))).is_zero();
    }
    report("poisson_jacobi", jac);

    bool sp1 = true;
    for (int q : {2, 3}) {
        const auto Q = quaternion_structure(q);
        const auto sp = sp_basis(q);
        const auto vb = v_basis(q);
        std::vector<AmbientTensor> fam;
        for (size_t i = 0; i < sp.size(); ++i)
            for (size_t j = i; j < sp.size(); ++j) fam.push_back(t1(sp[i], sp[j], q));
        for (size_t i = 0; i < vb.size(); ++i)
            for (size_t j = i; j < vb.size(); ++j) fam.push_back(t2(vb[i], vb[j], q));
        for (const auto& T : fam)
            for (int a = 0; a < 3; ++a) sp1 = sp1 && isotropy_action(T, Q.J[a]).is_zero();
    }
    report("sp1_invariance", sp1);

    const double t = seconds_since(t0);
    os << "time=" << t << "s";
    return {all && t <= 300.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"killing-lab acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "run only these criteria (1-11)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"OP2 headline dimensions", op2_headline},
        {"HP2 decomposability", hp2_decomposable},
        {"HP3 indecomposables spanned by families", hp3_indecomposables},
        {"CP2 and S3 decomposability", cp2_s3_decomposable},
        {"rank-one system equivalence", rank1_equivalence},
        {"second identity redundancy", eq22_redundancy},
        {"series constants", series_constants},
        {"top-slot single-term recursion", recursion_single_term},
        {"conservation along geodesics", conservation},
        {"duality", duality},
        {"property suites", property_suites},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), k) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << criteria[i].first << "): " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
