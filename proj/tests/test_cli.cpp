#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <sstream>
#include <sys/wait.h>

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(FREQGEN_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    Run r{-1, ""};
    if (!p) return r;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string fx(const std::string& name) { return testing_support::fixture_path(name); }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, '\t');) out.push_back(f);
    return out;
}

}  // namespace

TEST(Cli, CountMotzkin) {
    auto r = run("count " + fx("motzkin") + " --size 6");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "51\n");
    auto w = run("count " + fx("fibonacci") + " -n 3 -w a=2");
    EXPECT_EQ(w.out, "12\n");
}

TEST(Cli, CountCacheIsReused) {
    std::string cache = testing::TempDir() + "/motzkin.fqgt";
    std::remove(cache.c_str());
    auto a = run("count " + fx("motzkin") + " -n 40 --cache " + cache);
    auto b = run("count " + fx("motzkin") + " -n 30 --cache " + cache);
    auto c = run("count " + fx("motzkin") + " -n 30 --openmp");
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(b.out, c.out);
    std::remove(cache.c_str());
}

TEST(Cli, SampleIsDeterministic) {
    auto a = run("sample " + fx("rna") + " -n 40 -m 20 --seed 7");
    auto b = run("sample " + fx("rna") + " -n 40 -m 20 --seed 7");
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    auto ls = lines(a.out);
    ASSERT_EQ(ls.size(), 21u);
    EXPECT_EQ(ls[0].rfind("# seed=7 fingerprint=", 0), 0u);
    for (size_t i = 1; i < ls.size(); ++i) EXPECT_EQ(ls[i].size(), 40u);

    auto w1 = run("sample " + fx("motzkin") + " -n 30 -m 12 --seed 3 --workers 4 -f tree");
    auto w2 = run("sample " + fx("motzkin") + " -n 30 -m 12 --seed 3 --workers 4 -f tree");
    EXPECT_EQ(w1.out, w2.out);
    EXPECT_EQ(lines(w1.out)[1].front(), '(');

    auto fresh = run("sample " + fx("motzkin") + " -n 5");
    EXPECT_EQ(fresh.out.rfind("# seed=", 0), 0u);
}

TEST(Cli, SampleTraceTable) {
    auto r = run("sample " + fx("motzkin") + " -n 3 -m 5 --seed 1 -f tsv --trace");
    auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 7u);
    for (size_t i = 2; i < ls.size(); ++i) EXPECT_EQ(fields(ls[i]).back(), "1/4");
}

TEST(Cli, Freqs) {
    auto r = run("freqs " + fx("motzkin") + " -n 3");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("c\t1/2\t"), std::string::npos);
    auto dp = run("freqs " + fx("motzkin") + " -n 20 --method dp");
    auto pt = run("freqs " + fx("motzkin") + " -n 20 --method pointing");
    EXPECT_EQ(dp.out, pt.out);
}

TEST(Cli, FitThenFreqsRoundTrip) {
    auto r = run("fit " + fx("motzkin") + " -n 30 -t c=0.4");
    ASSERT_EQ(r.status, 0) << r.out;
    std::string weight;
    for (const auto& l : lines(r.out)) {
        auto f = fields(l);
        if (f.size() == 5 && f[0] == "c") weight = f[2];
    }
    ASSERT_FALSE(weight.empty());
    auto back = run("freqs " + fx("motzkin") + " -n 30 -w c=" + weight);
    double freq = -1;
    for (const auto& l : lines(back.out)) {
        auto f = fields(l);
        if (f.size() == 3 && f[0] == "c") freq = std::stod(f[2]);
    }
    EXPECT_LE(std::fabs(freq - 0.4) / freq, 1e-5);
}

TEST(Cli, AsymptAndSolve) {
    auto a = run("asympt " + fx("fibonacci"));
    EXPECT_EQ(a.status, 0);
    EXPECT_NE(a.out.find("rho\t0.61803398"), std::string::npos);
    auto s = run("solve " + fx("fibonacci") + " -t a=0.5");
    EXPECT_EQ(s.status, 0);
    EXPECT_NE(s.out.find("weight\ta\t1.1547005"), std::string::npos);
}

TEST(Cli, ExactSample) {
    auto r = run("exact-sample " + fx("motzkin") + " -n 4 -o a=1,b=1,c=2 -m 30 --seed 5");
    EXPECT_EQ(r.status, 0);
    auto ls = lines(r.out);
    ASSERT_FALSE(ls.empty());
    EXPECT_NE(ls[0].find("fiber=6"), std::string::npos);
    int data = 0;
    for (const auto& l : ls) {
        if (l.empty() || l[0] == '#') continue;
        ++data;
        EXPECT_EQ(std::count(l.begin(), l.end(), 'c'), 2);
    }
    EXPECT_EQ(data, 30);
}

TEST(Cli, ExitStatuses) {
    EXPECT_EQ(run("count").status, 2);
    EXPECT_EQ(run("count " + fx("motzkin")).status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
    EXPECT_EQ(run("asympt " + fx("motzkin")).status, 3);
    EXPECT_EQ(run("count /nonexistent.grammar -n 2").status, 3);
    EXPECT_EQ(run("solve " + fx("fibonacci") + " -t a=1.5").status, 3);
    EXPECT_EQ(run("fit " + fx("arith") + " -n 21 -t +=0.6").status, 4);
    EXPECT_EQ(run("sample " + fx("fibonacci") + " -n 3 -w a=0").status, 3);

    std::string cmd = "FREQGEN_TABLE_MEMORY=100 " + std::string(FREQGEN_BIN) + " exact-sample " + fx("motzkin") +
                      " -n 30 -o a=10,c=10 >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(st), 5);
}

TEST(Cli, ErrorLineIsMachineReadable) {
    std::string cmd = std::string(FREQGEN_BIN) + " asympt " + fx("motzkin") + " 2>&1 >/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_TRUE(p);
    std::array<char, 512> buf{};
    std::string err;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) err.append(buf.data(), got);
    pclose(p);
    EXPECT_EQ(err.rfind("error\tNotRegular\t", 0), 0u) << err;
}

TEST(Cli, EveryFixtureValidates) {
    for (const auto& name : testing_support::fixture_names()) {
        auto r = run("validate " + fx(name));
        EXPECT_EQ(r.status, 0) << name;
        EXPECT_NE(r.out.find("productive\tyes"), std::string::npos) << name;
    }
    EXPECT_EQ(run("validate " + fx("quadtree_balanced")).status, 0);
}
