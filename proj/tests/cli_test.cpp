#include "killing_lab/cli.hpp"

#include <gtest/gtest.h>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kl {
namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    const int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("kl_cli_test_" + name)).string();
}

// SHA-1 via the one-shot digest, independent of the streaming code path.
std::string sha1_hex(const std::string& s) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(s.data(), s.size(), md, &len, EVP_sha1(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

TEST(ContentHash, GitBlobConvention) {
    EXPECT_EQ(content_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    const std::string data = "killing\n";
    EXPECT_EQ(content_hash(data), sha1_hex("blob " + std::to_string(data.size()) + std::string(1, '\0') + data));
}

TEST(Catalog, ListsSpaces) {
    const auto r = run({"catalog"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("op2"), std::string::npos);
    EXPECT_NE(r.out.find("file:"), std::string::npos);
    const auto j = run({"catalog", "--format", "json"});
    ASSERT_EQ(j.code, kExitOk);
    const auto js = nlohmann::json::parse(j.out);
    EXPECT_EQ(js["schema"], kReportSchema);
    bool op2 = false, hpm3 = false;
    for (const auto& s : js["spaces"]) {
        op2 |= s["id"] == "op2" && s["n"] == 16;
        hpm3 |= s["id"] == "hpm:3" && s["n"] == 12;
    }
    EXPECT_TRUE(op2);
    EXPECT_TRUE(hpm3);
}

TEST(Solve, ReportFieldsAndDeterminism) {
    const auto a = run({"solve", "--space", "cpm:2", "--rank", "2"});
    ASSERT_EQ(a.code, kExitOk) << a.err;
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["indecomposable_dim"], 0);
    EXPECT_EQ(j["unknown_dim"], 20);
    EXPECT_EQ(j["solution_dim"], j["decomposable_dim"]);
    EXPECT_EQ(j["input_hash"].get<std::string>().size(), 40u);
    EXPECT_TRUE(j.contains("seed"));
    EXPECT_TRUE(j.contains("scale_factor"));
    EXPECT_FALSE(j.contains("elapsed"));
    const auto b = run({"solve", "--space", "cpm:2", "--rank", "2"});
    EXPECT_EQ(a.out, b.out);
    const auto c = run({"solve", "--space", "cpm:2", "--rank", "2", "--seed", "5"});
    EXPECT_NE(nlohmann::json::parse(c.out)["input_hash"], j["input_hash"]);
    const auto t = run({"solve", "--space", "cpm:2", "--timing"});
    EXPECT_TRUE(nlohmann::json::parse(t.out).contains("elapsed"));
}

TEST(Solve, CsvAndOutFile) {
    const std::string path = temp_path("solve.csv");
    const auto r = run({"solve", "--space", "sphere:3", "--format", "csv", "--out", path});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header.rfind("space,n,d,", 0), 0u);
    EXPECT_NE(row.find("sphere:3"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(ExitCodes, UsageErrors) {
    EXPECT_EQ(run({"solve", "--space", "nosuch"}).code, kExitUsage);
    EXPECT_EQ(run({"solve", "--space", "cpm:2", "--rank", "0"}).code, kExitUsage);
    EXPECT_EQ(run({"solve", "--space", "cpm:2", "--primes", "1"}).code, kExitUsage);
    EXPECT_EQ(run({"solve", "--space", "cpm:2", "--format", "xml"}).code, kExitUsage);
    EXPECT_EQ(run({"solve"}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--space", "cpm:2"}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--space", "op2-embedded"}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--space", "flat:3", "--from-nullspace", "0"}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--space", "cpm:2", "--from-nullspace", "999"}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--space", "cpm:2", "--tensor", "/nonexistent.json"}).code, kExitUsage);
}

TEST(Verify, NullspaceElementIsConserved) {
    const auto r = run({"verify", "--space", "cpm:2", "--from-nullspace", "0", "--geodesics", "5", "--order", "6"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LE(j["max_deviation"].get<double>(), 1e-8);
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Verify, ExportPerturbVerifyNegativeControl) {
    const std::string good = temp_path("good.json"), bad = temp_path("bad.json");
    ASSERT_EQ(run({"export", "--space", "cpm:2", "--index", "1", "--out", good}).code, kExitOk);
    ASSERT_EQ(run({"export", "--space", "cpm:2", "--index", "1", "--perturb", "1/3", "--out", bad}).code, kExitOk);
    const auto g = run({"verify", "--space", "cpm:2", "--tensor", good, "--geodesics", "4"});
    EXPECT_EQ(g.code, kExitOk) << g.err;
    const auto b = run({"verify", "--space", "cpm:2", "--tensor", bad, "--geodesics", "4"});
    EXPECT_EQ(b.code, kExitFailure);
    EXPECT_GT(nlohmann::json::parse(b.out)["max_deviation"].get<double>(), 1e-4);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
}

TEST(Verify, EmbeddedKA) {
    const std::string traj = temp_path("traj.csv");
    const auto r = run({"verify", "--space", "op2-embedded", "--ka-random", "--geodesics", "2", "--trajectory", traj});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_LE(nlohmann::json::parse(r.out)["max_deviation"].get<double>(), 1e-8);
    std::ifstream in(traj);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "s,value");
    std::filesystem::remove(traj);
}

TEST(Verify, EmbeddedCoarseStepsFail) {
    const auto r = run({"verify", "--space", "op2-embedded", "--ka-random", "--geodesics", "1", "--steps", "3"});
    EXPECT_EQ(r.code, kExitFailure);
}

TEST(Export, ExchangeFormatRoundTrip) {
    const auto r = run({"export", "--space", "sphere:3", "--index", "0"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto K = sym_pair_from_json(nlohmann::json::parse(r.out));
    EXPECT_EQ(K.n, 3);
    EXPECT_FALSE(K.is_zero());
}

}  // namespace
}  // namespace kl
