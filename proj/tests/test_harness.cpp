// SPDX-License-Identifier: Apache-2.0
//
// hybeam — hybrid analog/digital beamforming for mmWave MIMO, simulation library
// Copyright (C) 2026 the hybeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include <hybeam/experiment.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace hybeam;
using nlohmann::json;
using Catch::Matchers::ContainsSubstring;

namespace {

json tiny_config()
{
    json j;
    j["name"] = "tiny";
    j["tx"] = {{"array", "upa"}, {"width", 2}, {"height", 2},
               {"sector_az_deg", {-60.0, 60.0}}, {"sector_el_deg", {70.0, 110.0}}};
    j["rx"] = {{"array", "ula"}, {"width", 2}};
    j["channel"] = {{"clusters", 3}, {"rays_per_cluster", 1}, {"angle_spread_deg", 5.0}};
    j["link"] = {{"rf_chains_tx", 2}, {"rf_chains_rx", 2}, {"streams", 1}};
    j["snr_db"] = {0.0};
    j["trials"] = 2;
    j["seed"] = 5;
    return j;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string &args)
{
    const std::string cmd = std::string("\"") + HYBEAM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("config errors carry the offending field path")
{
    CHECK(std::string(ConfigError("a.b", "m").what()) == "config error at a.b: m");
    CHECK(std::string(ConfigError("", "m").what()) == "config error at .: m");
}

TEST_CASE("a minimal configuration picks up the documented defaults")
{
    json j;
    j["tx"] = {{"array", "upa"}, {"width", 2}, {"height", 2}};
    j["rx"] = {{"array", "ula"}, {"width", 2}};
    j["link"] = {{"rf_chains_tx", 2}, {"rf_chains_rx", 2}};
    const ParsedConfig pc = parse_config(j);

    CHECK(pc.name == "custom");
    CHECK(pc.channel.n_clusters == 8);
    CHECK(pc.channel.n_rays == 10);
    CHECK(pc.channel.angle_spread_rad == deg2rad(7.5));
    CHECK(pc.channel.tx.size() == 4);
    CHECK(pc.channel.rx.size() == 2);
    CHECK(pc.n_rf_tx == 2);
    CHECK(pc.n_rf_rx == 2);
    CHECK(pc.ns_list == std::vector<arma::uword>{1});
    CHECK_FALSE(pc.waterfill);
    CHECK(pc.snr_db == std::vector<double>{0.0});
    CHECK(pc.trials == 100);
    CHECK(pc.threads == 1);
    CHECK(pc.seed == 12345);
    REQUIRE(pc.methods.size() == 2);
    CHECK(pc.methods[0] == Method::optimal_unconstrained);
    CHECK(pc.methods[1] == Method::sparse_hybrid);
    CHECK(pc.feedback.bits_az == 3);
    CHECK(pc.feedback.bb_bits == 4);
    CHECK(pc.max_steering_subsets == 100000);
}

TEST_CASE("unknown keys are rejected with their full path")
{
    json j = tiny_config();
    j["frobnicate"] = 1;
    CHECK_THROWS_WITH(parse_config(j), "config error at frobnicate: unknown key");

    j = tiny_config();
    j["tx"]["bogus"] = 1;
    CHECK_THROWS_WITH(parse_config(j), "config error at tx.bogus: unknown key");

    j = tiny_config();
    j["channel"]["rician"] = true;
    CHECK_THROWS_WITH(parse_config(j), "config error at channel.rician: unknown key");

    j = tiny_config();
    j["link"]["modulation"] = "qam";
    CHECK_THROWS_WITH(parse_config(j), "config error at link.modulation: unknown key");

    j = tiny_config();
    j["snr_db"] = {{"start", 0.0}, {"stop", 5.0}, {"increment", 1.0}};
    CHECK_THROWS_WITH(parse_config(j), "config error at snr_db.increment: unknown key");
}

TEST_CASE("configuration field validation")
{
    json j = tiny_config();
    j.erase("tx");
    CHECK_THROWS_WITH(parse_config(j), "config error at .: missing required \"tx\" / \"rx\" array descriptions");

    j = tiny_config();
    j.erase("link");
    CHECK_THROWS_WITH(parse_config(j), "config error at .: missing required \"link\" section");

    j = tiny_config();
    j["tx"]["array"] = "circular";
    CHECK_THROWS_WITH(parse_config(j), "config error at tx.array: expected \"ula\" or \"upa\"");

    j = tiny_config();
    j["tx"]["sector_az_deg"] = {10.0};
    CHECK_THROWS_WITH(parse_config(j), "config error at tx.sector_az_deg: expected [min, max]");

    j = tiny_config();
    j["link"]["streams"] = "adaptive";
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at link.streams: adaptive streams require power_allocation = \"waterfilling\"");

    j = tiny_config();
    j["link"]["streams"] = 3; // exceeds min(rf_chains)
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at link.streams: streams must satisfy ns <= min(rf_chains_tx, rf_chains_rx)");

    j = tiny_config();
    j["link"]["rf_chains_tx"] = 5; // tx has 4 antennas
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at link.rf_chains_tx: need 1 <= rf_chains_tx <= transmit antenna count");

    j = tiny_config();
    j["link"]["power_allocation"] = "uniformish";
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at link.power_allocation: expected \"equal\" or \"waterfilling\"");

    j = tiny_config();
    j["snr_db"] = {{"start", 0.0}, {"stop", 10.0}, {"step", 0.0}};
    CHECK_THROWS_WITH(parse_config(j), "config error at snr_db: need start <= stop and step > 0");

    j = tiny_config();
    j["trials"] = 0;
    CHECK_THROWS_WITH(parse_config(j), "config error at trials: need trials >= 1");

    j = tiny_config();
    j["seed"] = -1;
    CHECK_THROWS_WITH(parse_config(j), "config error at seed: expected a non-negative integer");

    j = tiny_config();
    j["methods"] = {"optimal-unconstrained", "zero-forcing"};
    CHECK_THROWS_WITH(parse_config(j), ContainsSubstring("config error at methods[1]:"));

    j = tiny_config();
    j["methods"] = {"quantized-sparse-hybrid"};
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at feedback: the quantized-sparse-hybrid method requires a feedback section");

    j = tiny_config();
    j["sweep_angle_spread_deg"] = {0.0, 5.0};
    j["sweep_bits_per_angle"] = {2};
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at sweep_bits_per_angle: only one outer sweep may be configured");

    j = tiny_config();
    j["channel"]["cluster_powers"] = {1.0, 2.0}; // 3 clusters configured
    CHECK_THROWS_WITH(parse_config(j), ContainsSubstring("config error at channel:"));

    j = tiny_config();
    j["channel"]["cluster_powers"] = "unequal";
    CHECK_THROWS_WITH(parse_config(j),
                      "config error at channel.cluster_powers: expected \"equal\" or an array of powers");
}

TEST_CASE("SNR grids accept lists and inclusive start/stop/step ranges")
{
    json j = tiny_config();
    j["snr_db"] = {-10.0, -5.0};
    CHECK(parse_config(j).snr_db == std::vector<double>{-10.0, -5.0});

    j["snr_db"] = {{"start", -10.0}, {"stop", 0.0}, {"step", 5.0}};
    CHECK(parse_config(j).snr_db == std::vector<double>{-10.0, -5.0, 0.0});

    j["snr_db"] = {{"start", 0.0}, {"stop", 9.0}, {"step", 5.0}};
    CHECK(parse_config(j).snr_db == std::vector<double>{0.0, 5.0});
}

TEST_CASE("every named experiment parses cleanly")
{
    for (const std::string name : {"fig2", "fig3", "fig4", "fig5", "fig6"})
    {
        const json j = named_experiment_json(name);
        const ParsedConfig pc = parse_config(j);
        CHECK(pc.name == name);
    }

    const ParsedConfig f2 = parse_config(named_experiment_json("fig2"));
    CHECK(f2.trials == 500);
    CHECK(f2.seed == 12345);
    CHECK(f2.snr_db.size() == 9);
    CHECK(f2.snr_db.front() == -30.0);
    CHECK(f2.snr_db.back() == 10.0);
    CHECK(f2.methods.size() == 3);
    CHECK(f2.ns_list == std::vector<arma::uword>{1, 2});
    CHECK(f2.channel.tx.size() == 64);
    CHECK(f2.channel.rx.size() == 16);

    const ParsedConfig f4 = parse_config(named_experiment_json("fig4"));
    CHECK(f4.ns_list == std::vector<arma::uword>{0});
    CHECK(f4.waterfill);
    CHECK(f4.channel.tx.size() == 256);

    const ParsedConfig f5 = parse_config(named_experiment_json("fig5"));
    CHECK(f5.sweep_angle_spread_deg.size() == 7);

    const ParsedConfig f6 = parse_config(named_experiment_json("fig6"));
    CHECK(f6.sweep_bits_per_angle == std::vector<arma::uword>{1, 2, 3, 4});
    CHECK(f6.feedback.bb_bits == 4);

    CHECK_THROWS_AS(named_experiment_json("fig7"), ConfigError);
    CHECK_THROWS_WITH(named_experiment_json("fig7"), ContainsSubstring("unknown named experiment"));
}

TEST_CASE("complex matrices survive the JSON round trip bit for bit")
{
    RandomStream rng(601);
    arma::cx_mat m(3, 2);
    for (auto &v : m)
        v = rng.complex_gaussian(1.0);
    m(1, 1) = arma::cx_double(1.0 / 3.0, -pi);

    const json j = complex_matrix_to_json(m);
    CHECK(arma::abs(complex_matrix_from_json(j, "m") - m).max() == 0.0);

    // through text serialization as well
    const json reparsed = json::parse(j.dump());
    CHECK(arma::abs(complex_matrix_from_json(reparsed, "m") - m).max() == 0.0);

    CHECK_THROWS_AS(complex_matrix_from_json(json::array(), "m"), ConfigError);
    CHECK_THROWS_AS(complex_matrix_from_json(json::parse("[[1,2]]"), "m"), ConfigError);      // not [re,im] pairs
    CHECK_THROWS_AS(complex_matrix_from_json(json::parse("[[[1,2]],[[1,2],[3,4]]]"), "m"), ConfigError); // ragged
    CHECK_THROWS_AS(complex_matrix_from_json(json::parse("[[[1,2,3]]]"), "m"), ConfigError);  // triple
}

TEST_CASE("channel realizations serialize with their rays and matrix")
{
    ChannelParams p;
    p.tx = ArrayGeometry::make_upa(2, 2, 0.5);
    p.rx = ArrayGeometry::make_ula(2, 0.5);
    p.n_clusters = 3;
    p.n_rays = 2;
    p.angle_spread_rad = deg2rad(5.0);
    RandomStream rng(602);
    const ChannelRealization real = sample_channel(p, rng);

    const json j = channel_to_json(real);
    CHECK(j["n_rx"] == 2);
    CHECK(j["n_tx"] == 4);
    CHECK(j["clusters"] == 3);
    CHECK(j["rays_per_cluster"] == 2);
    REQUIRE(j["rays"].size() == 6);
    CHECK(j["rays"][0]["cluster"] == 0);
    CHECK(j["rays"][5]["ray"] == 1);
    CHECK(arma::abs(complex_matrix_from_json(j["h"], "h") - real.h).max() == 0.0);
}

TEST_CASE("feedback codebooks round trip through their file format")
{
    Sector s;
    s.az_min_rad = deg2rad(-30.0);
    s.az_max_rad = deg2rad(30.0);
    s.el_min_rad = deg2rad(80.0);
    s.el_max_rad = deg2rad(100.0);

    FeedbackConfig fc;
    fc.angles = angle_codebook(2, 1, s);
    fc.bb.bits = 1;
    RandomStream rng(603);
    for (int e = 0; e < 2; ++e)
    {
        arma::cx_mat m(2, 1);
        for (auto &v : m)
            v = rng.complex_gaussian(1.0);
        fc.bb.entries.push_back(m / arma::norm(m));
    }

    const json j = json::parse(feedback_codebook_to_json(fc).dump());
    const FeedbackConfig back = feedback_codebook_from_json(j);
    CHECK(back.angles.bits_az == 2);
    CHECK(back.angles.bits_el == 1);
    CHECK(arma::abs(back.angles.az_points - fc.angles.az_points).max() < 1e-12);
    CHECK(arma::abs(back.angles.el_points - fc.angles.el_points).max() < 1e-12);
    CHECK(back.bb.bits == 1);
    REQUIRE(back.bb.entries.size() == 2);
    for (int e = 0; e < 2; ++e)
        CHECK(arma::abs(back.bb.entries[e] - fc.bb.entries[e]).max() == 0.0);

    json wrong = j;
    wrong["type"] = "something-else";
    CHECK_THROWS_AS(feedback_codebook_from_json(wrong), ConfigError);
    json missing = j;
    missing.erase("bb_bits");
    CHECK_THROWS_AS(feedback_codebook_from_json(missing), ConfigError);
    json short_list = j;
    short_list["entries"].erase(1);
    CHECK_THROWS_AS(feedback_codebook_from_json(short_list), ConfigError);
}

TEST_CASE("running a configuration yields points, CSV and a reusable manifest")
{
    const json config = tiny_config();
    const ExperimentOutput out = run_experiment_json(config);

    REQUIRE(out.points.size() == 2); // 2 methods x 1 snr x 1 ns
    CHECK(out.csv == rate_table_csv(out.points));
    CHECK(out.manifest["tool"] == "hybeam");
    CHECK(out.manifest["kind"] == "rate-sweep");
    CHECK(out.manifest["version"] == version);
    CHECK(out.manifest["config"] == config);

    // feeding the manifest back reproduces the run exactly
    const ExperimentOutput again = run_experiment_json(out.manifest);
    CHECK(again.csv == out.csv);
}

TEST_CASE("variants expand into labeled sub-runs")
{
    json config = tiny_config();
    config["variants"] = json::array({json{{"label", "a"}}, json{{"label", "b"}, {"link", {{"streams", 2}}}}, json::object()});
    const ExperimentOutput out = run_experiment_json(config);

    REQUIRE(out.points.size() == 6);
    CHECK(out.points[0].method == "optimal-unconstrained[a]");
    CHECK(out.points[0].ns == 1);
    CHECK(out.points[2].method == "optimal-unconstrained[b]");
    CHECK(out.points[2].ns == 2);
    CHECK(out.points[4].method == "optimal-unconstrained[v2]"); // default label
    CHECK(out.points[4].ns == 1);

    json bad = tiny_config();
    bad["variants"] = json::array();
    CHECK_THROWS_AS(run_experiment_json(bad), ConfigError);
    bad["variants"] = json::array({json::array()});
    CHECK_THROWS_AS(run_experiment_json(bad), ConfigError);
}

TEST_CASE("an angle-spread sweep tags each sub-run, joined with the variant label")
{
    json config = tiny_config();
    config["sweep_angle_spread_deg"] = {0.0, 5.0};
    const ExperimentOutput out = run_experiment_json(config);
    REQUIRE(out.points.size() == 4);
    CHECK(out.points[0].method == "optimal-unconstrained[spread=0]");
    CHECK(out.points[2].method == "optimal-unconstrained[spread=5]");

    config["variants"] = json::array({json{{"label", "a"}}});
    const ExperimentOutput labeled = run_experiment_json(config);
    CHECK(labeled.points[0].method == "optimal-unconstrained[a,spread=0]");
    CHECK(labeled.points[2].method == "optimal-unconstrained[a,spread=5]");
}

TEST_CASE("a bits-per-angle sweep retrains the quantizer per point")
{
    json config = tiny_config();
    config["methods"] = {"sparse-hybrid", "quantized-sparse-hybrid"};
    config["feedback"] = {{"bb_bits", 2}, {"training_samples", 8}};
    config["sweep_bits_per_angle"] = {1, 2};
    const ExperimentOutput out = run_experiment_json(config);

    REQUIRE(out.points.size() == 4);
    CHECK(out.points[0].method == "sparse-hybrid[bits=1]");
    CHECK(out.points[1].method == "quantized-sparse-hybrid[bits=1]");
    CHECK(out.points[2].method == "sparse-hybrid[bits=2]");
    CHECK(out.points[3].method == "quantized-sparse-hybrid[bits=2]");
    for (const RatePoint &p : out.points)
    {
        CHECK(p.rate_mean > 0.0);
        CHECK(std::isfinite(p.rate_mean));
    }
}

TEST_CASE("a codebook file preempts training and fixes the quantizer geometry")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hybeam_codebook_file_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    json config = tiny_config();
    config["methods"] = {"sparse-hybrid", "quantized-sparse-hybrid"};
    config["feedback"] = {{"bb_bits", 2}, {"training_samples", 8}, {"bits_az", 2}, {"bits_el", 2}};
    const ParsedConfig pc = parse_config(config);

    FeedbackConfig fc;
    fc.angles = angle_codebook(2, 2, pc.channel.tx.sector);
    fc.bb = train_codebook_for_channel(pc.channel, 2, 1, fc.angles, 2, 8, pc.seed);
    const fs::path cb_path = dir / "cb.json";
    std::ofstream(cb_path) << feedback_codebook_to_json(fc).dump(2) << "\n";

    json filed = config;
    filed["feedback"] = {{"codebook_file", cb_path.string()}};
    const ExperimentOutput from_file = run_experiment_json(filed);
    const ExperimentOutput trained = run_experiment_json(config);
    CHECK(from_file.csv == trained.csv); // same codebook, training skipped

    json missing = config;
    missing["feedback"] = {{"codebook_file", (dir / "nope.json").string()}};
    CHECK_THROWS_WITH(run_experiment_json(missing), ContainsSubstring("cannot open"));

    fs::remove_all(dir);
}

TEST_CASE("beam pattern rendering is deterministic with the expected grid")
{
    const BeamPatternOutput a = run_beampattern(3, 15.0, 20.0);
    const BeamPatternOutput b = run_beampattern(3, 15.0, 20.0);
    CHECK(a.csv_optimal == b.csv_optimal);
    CHECK(a.csv_hybrid == b.csv_hybrid);
    CHECK(a.csv_steering == b.csv_steering);

    // 13 azimuth x 5 elevation samples plus the header line
    auto line_count = [](const std::string &s) { return std::count(s.begin(), s.end(), '\n'); };
    CHECK(line_count(a.csv_optimal) == 13 * 5 + 1);
    CHECK(line_count(a.csv_hybrid) == 13 * 5 + 1);
    CHECK(line_count(a.csv_steering) == 13 * 5 + 1);
    CHECK(a.csv_optimal.rfind("az_deg,el_deg,gain_db\n", 0) == 0);
    CHECK(a.manifest["kind"] == "beampattern");
    CHECK(a.manifest["seed"] == 3);

    const BeamPatternOutput c = run_beampattern(4, 15.0, 20.0);
    CHECK(c.csv_hybrid != a.csv_hybrid);

    CHECK_THROWS_AS(run_beampattern(3, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(run_beampattern(3, 1.0, -2.0), ConfigError);
}

TEST_CASE("command line driver: exit codes and artifacts")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hybeam_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);                    // a subcommand is required
    CHECK(run_cli("run fig7") == 2);            // unknown experiment name
    CHECK(run_cli("run-config /nonexistent.json") == 2);

    const fs::path broken = dir / "broken.json";
    std::ofstream(broken) << "{ not json";
    CHECK(run_cli("run-config " + broken.string()) == 2);

    const fs::path bad_value = dir / "bad_value.json";
    {
        json j = tiny_config();
        j["trials"] = 0;
        std::ofstream(bad_value) << j.dump(2);
    }
    CHECK(run_cli("run-config " + bad_value.string()) == 2);

    const fs::path cfg_path = dir / "tiny.json";
    std::ofstream(cfg_path) << tiny_config().dump(2);

    const fs::path out1 = dir / "out1", out2 = dir / "out2";
    REQUIRE(run_cli("run-config " + cfg_path.string() + " --out " + out1.string()) == 0);
    REQUIRE(fs::exists(out1 / "tiny_rates.csv"));
    REQUIRE(fs::exists(out1 / "tiny_manifest.json"));

    // rerunning is byte-identical, and the manifest reproduces the run
    REQUIRE(run_cli("run-config " + cfg_path.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "tiny_rates.csv") == slurp(out2 / "tiny_rates.csv"));

    const fs::path out3 = dir / "out3";
    REQUIRE(run_cli("run-config " + (out1 / "tiny_manifest.json").string() + " --out " + out3.string()) == 0);
    CHECK(slurp(out3 / "tiny_rates.csv") == slurp(out1 / "tiny_rates.csv"));

    // the CSV matches the in-process run of the same config
    const ExperimentOutput direct = run_experiment_json(tiny_config());
    CHECK(slurp(out1 / "tiny_rates.csv") == direct.csv);

    // a seed override changes the results
    const fs::path out4 = dir / "out4";
    REQUIRE(run_cli("run-config " + cfg_path.string() + " --seed 6 --out " + out4.string()) == 0);
    CHECK(slurp(out4 / "tiny_rates.csv") != slurp(out1 / "tiny_rates.csv"));

    fs::remove_all(dir);
}

TEST_CASE("command line driver: channel dumps, codebooks and beam patterns")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hybeam_cli_tools_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const fs::path cfg_path = dir / "tiny.json";
    {
        json j = tiny_config();
        j["methods"] = {"sparse-hybrid", "quantized-sparse-hybrid"};
        j["feedback"] = {{"bb_bits", 2}, {"training_samples", 8}, {"bits_az", 2}, {"bits_el", 2}};
        std::ofstream(cfg_path) << j.dump(2);
    }

    // channel dump: one JSON object per line
    const fs::path dump_path = dir / "channels.jsonl";
    REQUIRE(run_cli("dump-channels --config " + cfg_path.string() + " --count 3 --out " + dump_path.string()) == 0);
    std::ifstream dump(dump_path);
    std::string line;
    int lines = 0;
    while (std::getline(dump, line))
    {
        const json j = json::parse(line);
        CHECK(j.contains("h"));
        CHECK(j.contains("rays"));
        ++lines;
    }
    CHECK(lines == 3);

    // codebook training produces a loadable file that run-config accepts
    const fs::path cb_path = dir / "cb.json";
    REQUIRE(run_cli("codebook train --config " + cfg_path.string() + " --samples 8 --out " + cb_path.string()) == 0);
    const json cb = json::parse(slurp(cb_path));
    CHECK(cb["type"] == "hybeam-feedback-codebook");
    CHECK_NOTHROW(feedback_codebook_from_json(cb));

    {
        json j = json::parse(slurp(cfg_path));
        j["feedback"] = {{"codebook_file", cb_path.string()}};
        std::ofstream(cfg_path) << j.dump(2);
    }
    const fs::path out = dir / "out";
    REQUIRE(run_cli("run-config " + cfg_path.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "tiny_rates.csv"));

    // beam pattern artifacts
    const fs::path pat = dir / "pattern";
    REQUIRE(run_cli("beampattern --az-step 30 --el-step 40 --seed 9 --out " + pat.string()) == 0);
    for (const char *f : {"beampattern_optimal.csv", "beampattern_hybrid.csv", "beampattern_steering.csv",
                          "beampattern_manifest.json"})
        CHECK(fs::exists(pat / f));

    fs::remove_all(dir);
}
