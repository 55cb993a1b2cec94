#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "support.hpp"

using namespace scenematch;
using namespace testsupport;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SCENEMATCH_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scene(const char* name) { return "--scene " + data_path(name); }
std::string desc(const char* name) { return "--desc " + data_path(name); }

} // namespace

TEST(Cli, MatchFloodgateQuery) {
    const auto r = run("match " + scene("plant_scene.json") + " " + desc("floodgate.desc") + " --min-likelihood 0.05");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("hypothesis 1 π = 1.00"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("hypothesis 3 π = 0.10"), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("hypothesis 4"), std::string::npos) << r.out;
}

TEST(Cli, MatchJsonRoundTrips) {
    const auto r = run("match " + scene("plant_scene.json") + " --desc-text 'horizontal pipe on red floodgate' " +
                       "--min-likelihood 0.05 --format json");
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(r.out);
    const auto rs = recognized_from_json(doc);
    MatchOptions o;
    o.min_likelihood = 0.05;
    const auto direct = enumerate_hypotheses(desc_file("pipe_on_floodgate.desc"), plant_scene(), {}, o);
    ASSERT_EQ(rs.hypotheses.size(), direct.hypotheses.size());
    for (std::size_t i = 0; i < rs.hypotheses.size(); ++i) {
        EXPECT_EQ(rs.hypotheses[i].binding, direct.hypotheses[i].binding);
        EXPECT_EQ(rs.hypotheses[i].likelihood, direct.hypotheses[i].likelihood);
    }
}

TEST(Cli, MatchExitCodes) {
    EXPECT_EQ(run("match " + scene("plant_scene.json") + " --desc-text 'blue elbow' ").code, 1);
    EXPECT_EQ(run("match --scene /nonexistent.json " + desc("floodgate.desc")).code, 2);
    EXPECT_EQ(run("match " + scene("plant_scene.json") + " " + desc("floodgate.desc") + " --min-likelihood 1.01").code, 2);
    EXPECT_EQ(run("match " + scene("plant_scene.json") + " --desc-text 'purple floodgate'").code, 2);
    EXPECT_EQ(run("match " + scene("plant_scene.json") + " " + desc("floodgate.desc") + " --aggregator median").code, 2);
    EXPECT_EQ(run("").code, 2);
}

TEST(Cli, StrictDepth) {
    const std::string base = "match " + scene("plant_scene.json") + " --desc-text 'pipe in front of red floodgate'";
    EXPECT_EQ(run(base + " --min-likelihood 0.5").code, 0);
    EXPECT_EQ(run(base + " --strict").code, 2);
}

TEST(Cli, Redundancy) {
    const auto r = run("redundancy " + scene("pipe_regions_scene.json") + " " + desc("blue_pipe.desc"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("kernel (o1.horizontal o1.pipe)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("description redundancy 2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("best match R3"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("(0.90, 0.40)"), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("lattice:"), std::string::npos);

    const auto v = run("redundancy -v --ambiguity-scope subd --format json " + scene("pipe_regions_scene.json") + " " +
                       desc("blue_pipe.desc"));
    ASSERT_EQ(v.code, 0);
    const auto doc = nlohmann::json::parse(v.out);
    EXPECT_TRUE(doc.contains("trace"));
    EXPECT_EQ(doc["performance"]["non_ambiguity"], 0.3);
}

TEST(Cli, RedundancyNoMatch) {
    const auto dir = std::filesystem::temp_directory_path() / "scenematch_cli_test";
    std::filesystem::create_directories(dir);
    const auto empty = (dir / "empty.json").string();
    std::ofstream(empty) << R"({"objects": []})";
    EXPECT_EQ(run("redundancy --scene " + empty + " " + desc("blue_pipe.desc")).code, 1);
    EXPECT_EQ(run("redundancy " + scene("pipe_regions_scene.json") + " " + desc("blue_pipe.desc") +
                  " --min-ambiguity 2")
                  .code,
              2);
}

TEST(Cli, Parse) {
    const auto r = run("parse --desc-text 'Horizontal pipe on red floodgate'");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "horizontal pipe on red floodgate[hunt]\n");
    const auto j = run("parse --format json " + desc("elbow_chain.desc"));
    ASSERT_EQ(j.code, 0);
    EXPECT_EQ(nlohmann::json::parse(j.out)["alternatives"][0]["objects"].size(), 3u);
    EXPECT_EQ(run("parse --desc-text 'red floodgate on'").code, 2);
}

TEST(Cli, GenIsDeterministic) {
    const auto a = run("gen --seed 17 --degradation 0.2 --false-rate 0.5 --hidden-rate 0.3");
    const auto b = run("gen --seed 17 --degradation 0.2 --false-rate 0.5 --hidden-rate 0.3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto doc = nlohmann::json::parse(a.out);
    const auto s = scene_from_json(doc["scene"]);
    EXPECT_GE(s.objects.size(), 13u);
    EXPECT_EQ(doc["ground_truth"].size(), 3u);
    EXPECT_EQ(run("gen --false-rate 2").code, 2);
}

TEST(Cli, GenWritesFilesUsableByMatch) {
    const auto dir = std::filesystem::temp_directory_path() / "scenematch_cli_test";
    std::filesystem::create_directories(dir);
    const auto s = (dir / "gen_scene.json").string();
    const auto d = (dir / "gen.desc").string();
    ASSERT_EQ(run("gen --seed 3 --scene-out " + s + " --desc-out " + d).code, 0);
    const auto r = run("match --scene " + s + " --desc " + d + " --min-likelihood 1.0");
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, Params) {
    const auto r = run("params --dump");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(params_from_json(nlohmann::json::parse(r.out)), MembershipParams{});
    const auto dir = std::filesystem::temp_directory_path() / "scenematch_cli_test";
    std::filesystem::create_directories(dir);
    const auto bad = (dir / "bad_params.json").string();
    std::ofstream(bad) << R"({"horizontal": {"zero": 1, "full": 1}})";
    EXPECT_EQ(run("params --params " + bad).code, 2);
}
