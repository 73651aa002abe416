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
//
// Command line driver.
//
//   hybeam run <name>            run a named experiment (fig2..fig6, beampattern)
//   hybeam run-config <file>     run a JSON configuration (or a manifest)
//   hybeam codebook train        train a baseband feedback codebook
//   hybeam beampattern           render beam pattern CSVs
//   hybeam dump-channels         dump channel realizations as JSON lines
//
// Exit codes: 0 success, 2 configuration error, 3 runtime/numerical failure.

#include <hybeam/hybeam.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path &path, const std::string &text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file '" + path.string() + "'");
    out << text;
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
    std::cout << "wrote " << path.string() << "\n";
}

nlohmann::json load_json(const std::string &file)
{
    std::ifstream in(file);
    if (!in)
        throw hybeam::ConfigError("", "cannot open config file '" + file + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

struct Overrides
{
    std::uint64_t seed = 0;
    bool has_seed = false;
    unsigned trials = 0;
    bool has_trials = false;
    unsigned threads = 0;
    bool has_threads = false;

    void apply(nlohmann::json &config) const
    {
        if (has_seed)
            config["seed"] = seed;
        if (has_trials)
            config["trials"] = trials;
        if (has_threads)
            config["threads"] = threads;
    }
};

void run_rate_experiment(nlohmann::json config, const Overrides &ov, const std::string &out_dir)
{
    // unwrap a manifest so overrides land on the embedded config
    if (config.contains("config") && config.contains("tool"))
        config = config["config"];
    ov.apply(config);
    const hybeam::ExperimentOutput out = hybeam::run_experiment_json(config);
    std::string name = "custom";
    if (config.contains("name") && config["name"].is_string())
        name = config["name"].get<std::string>();
    write_file(fs::path(out_dir) / (name + "_rates.csv"), out.csv);
    write_file(fs::path(out_dir) / (name + "_manifest.json"), out.manifest.dump(2) + "\n");
}

void run_beampattern_experiment(std::uint64_t seed, double az_step, double el_step, const std::string &out_dir)
{
    const hybeam::BeamPatternOutput out = hybeam::run_beampattern(seed, az_step, el_step);
    write_file(fs::path(out_dir) / "beampattern_optimal.csv", out.csv_optimal);
    write_file(fs::path(out_dir) / "beampattern_hybrid.csv", out.csv_hybrid);
    write_file(fs::path(out_dir) / "beampattern_steering.csv", out.csv_steering);
    write_file(fs::path(out_dir) / "beampattern_manifest.json", out.manifest.dump(2) + "\n");
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"hybeam — hybrid analog/digital beamforming simulations for mmWave MIMO"};
    app.require_subcommand(1);

    Overrides ov;
    std::string out_dir = ".";
    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--seed", ov.seed, "override the RNG seed")->each([&](const std::string &) {
            ov.has_seed = true;
        });
        cmd->add_option("--trials", ov.trials, "override the Monte Carlo trial count")
            ->each([&](const std::string &) { ov.has_trials = true; });
        cmd->add_option("--threads", ov.threads, "override the worker thread count")
            ->each([&](const std::string &) { ov.has_threads = true; });
        cmd->add_option("--out", out_dir, "output directory (default: current directory)");
    };

    // run <name>
    std::string run_name;
    CLI::App *run = app.add_subcommand("run", "run a named experiment");
    run->add_option("name", run_name, "experiment name: fig2, fig3, fig4, fig5, fig6, or beampattern")
        ->required();
    add_common(run);

    // run-config <file>
    std::string config_file;
    CLI::App *run_config = app.add_subcommand("run-config", "run a JSON experiment configuration");
    run_config->add_option("file", config_file, "path to a configuration (or manifest) JSON file")->required();
    add_common(run_config);

    // codebook train
    CLI::App *codebook = app.add_subcommand("codebook", "feedback codebook utilities");
    codebook->require_subcommand(1);
    std::string cb_config_file;
    std::string cb_out = "codebook.json";
    unsigned cb_samples = 0;
    CLI::App *cb_train = codebook->add_subcommand("train", "train the baseband subspace codebook for a config");
    cb_train->add_option("--config", cb_config_file, "experiment configuration supplying channel/link/feedback")
        ->required();
    cb_train->add_option("--samples", cb_samples, "override the training sample count");
    cb_train->add_option("--seed", ov.seed, "override the RNG seed")->each([&](const std::string &) {
        ov.has_seed = true;
    });
    cb_train->add_option("--out", cb_out, "output codebook file");

    // beampattern
    double az_step = 1.0, el_step = 1.0;
    CLI::App *pattern = app.add_subcommand("beampattern", "render transmit beam pattern CSVs");
    pattern->add_option("--az-step", az_step, "azimuth grid step in degrees");
    pattern->add_option("--el-step", el_step, "elevation grid step in degrees");
    pattern->add_option("--seed", ov.seed, "override the RNG seed")->each([&](const std::string &) {
        ov.has_seed = true;
    });
    pattern->add_option("--out", out_dir, "output directory (default: current directory)");

    // dump-channels
    std::string dump_config_file;
    std::string dump_out = "channels.jsonl";
    unsigned dump_count = 10;
    CLI::App *dump = app.add_subcommand("dump-channels", "dump channel realizations as JSON lines");
    dump->add_option("--config", dump_config_file, "experiment configuration supplying the channel model")
        ->required();
    dump->add_option("--count", dump_count, "number of realizations to dump");
    dump->add_option("--seed", ov.seed, "override the RNG seed")->each([&](const std::string &) {
        ov.has_seed = true;
    });
    dump->add_option("--out", dump_out, "output file");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (app.got_subcommand(run))
        {
            if (run_name == "beampattern")
                run_beampattern_experiment(ov.has_seed ? ov.seed : 12345, az_step, el_step, out_dir);
            else
                run_rate_experiment(hybeam::named_experiment_json(run_name), ov, out_dir);
        }
        else if (app.got_subcommand(run_config))
        {
            run_rate_experiment(load_json(config_file), ov, out_dir);
        }
        else if (app.got_subcommand(codebook))
        {
            nlohmann::json cj = load_json(cb_config_file);
            if (cj.contains("config") && cj.contains("tool"))
                cj = cj["config"];
            cj.erase("variants"); // train for the base configuration
            const hybeam::ParsedConfig pc = hybeam::parse_config(cj);
            if (pc.ns_list.size() != 1 || pc.ns_list[0] == 0)
                throw hybeam::ConfigError("link.streams", "codebook training requires a single fixed stream count");
            const std::uint64_t seed = ov.has_seed ? ov.seed : pc.seed;
            const arma::uword samples = cb_samples > 0 ? cb_samples : pc.feedback.training_samples;
            hybeam::FeedbackConfig fc;
            fc.angles = hybeam::angle_codebook(pc.feedback.bits_az, pc.feedback.bits_el, pc.channel.tx.sector);
            fc.bb = hybeam::train_codebook_for_channel(pc.channel, pc.n_rf_tx, pc.ns_list[0], fc.angles,
                                                       pc.feedback.bb_bits, samples, seed);
            write_file(cb_out, hybeam::feedback_codebook_to_json(fc).dump(2) + "\n");
        }
        else if (app.got_subcommand(pattern))
        {
            run_beampattern_experiment(ov.has_seed ? ov.seed : 12345, az_step, el_step, out_dir);
        }
        else if (app.got_subcommand(dump))
        {
            nlohmann::json cj = load_json(dump_config_file);
            if (cj.contains("config") && cj.contains("tool"))
                cj = cj["config"];
            cj.erase("variants");
            const hybeam::ParsedConfig pc = hybeam::parse_config(cj);
            const std::uint64_t seed = ov.has_seed ? ov.seed : pc.seed;
            const hybeam::RandomStream root(seed);
            std::string lines;
            for (unsigned t = 0; t < dump_count; ++t)
            {
                hybeam::RandomStream rng = root.substream(0, t);
                const hybeam::ChannelRealization real = hybeam::sample_channel(pc.channel, rng);
                lines += hybeam::channel_to_json(real).dump() + "\n";
            }
            write_file(dump_out, lines);
        }
    }
    catch (const hybeam::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const nlohmann::json::exception &e)
    {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
