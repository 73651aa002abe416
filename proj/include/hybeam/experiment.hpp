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
// Experiment harness: the JSON configuration schema (documented in the
// README), named desk-scale experiments, variant/sweep expansion, run
// manifests, and the JSON serializations of channel realizations and
// feedback codebooks.

#pragma once

#include "metrics.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace hybeam {

// Configuration problems (bad schema, bad values, inconsistent settings).
// The CLI maps this to exit code 2; everything else non-config maps to 3.
class ConfigError : public std::invalid_argument
{
  public:
    ConfigError(const std::string &path, const std::string &message)
        : std::invalid_argument("config error at " + (path.empty() ? "." : path) + ": " + message)
    {
    }
};

namespace cfg {

using json = nlohmann::json;

inline void check_keys(const json &j, const std::string &path, const std::set<std::string> &allowed)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

inline const json *find(const json &j, const std::string &key)
{
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double as_double(const json &v, const std::string &path)
{
    if (!v.is_number())
        throw ConfigError(path, "expected a number");
    return v.get<double>();
}

inline arma::uword as_uword(const json &v, const std::string &path)
{
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(path, "expected a non-negative integer");
    return arma::uword(v.get<unsigned long long>());
}

inline std::string as_string(const json &v, const std::string &path)
{
    if (!v.is_string())
        throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

inline double get_double(const json &j, const std::string &path, const std::string &key, double fallback)
{
    const json *v = find(j, key);
    return v ? as_double(*v, path + "." + key) : fallback;
}

inline arma::uword get_uword(const json &j, const std::string &path, const std::string &key, arma::uword fallback)
{
    const json *v = find(j, key);
    return v ? as_uword(*v, path + "." + key) : fallback;
}

inline std::vector<double> as_double_list(const json &v, const std::string &path)
{
    if (!v.is_array() || v.empty())
        throw ConfigError(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace cfg

// ---- Parsed configuration -------------------------------------------------------

struct ParsedConfig
{
    std::string name = "custom";
    ChannelParams channel;
    arma::uword n_rf_tx = 1, n_rf_rx = 1;
    std::vector<arma::uword> ns_list{1}; // {0} = rank-adaptive
    bool waterfill = false;
    std::vector<double> snr_db{0.0};
    arma::uword trials = 100;
    arma::uword threads = 1;
    std::uint64_t seed = 12345;
    std::vector<Method> methods;
    FeedbackSetup feedback;
    std::string codebook_file;            // optional pre-trained baseband codebook
    arma::uword max_steering_subsets = 100000;
    std::vector<double> sweep_angle_spread_deg; // optional outer sweep
    std::vector<arma::uword> sweep_bits_per_angle;
};

namespace cfg {

inline ArrayGeometry parse_array(const json &j, const std::string &path)
{
    if (!j.is_object())
        throw ConfigError(path, "expected an object");
    check_keys(j, path, {"array", "width", "height", "spacing_wavelengths", "sector_az_deg", "sector_el_deg"});
    const std::string kind = find(j, "array") ? as_string(*find(j, "array"), path + ".array") : "upa";
    if (kind != "ula" && kind != "upa")
        throw ConfigError(path + ".array", "expected \"ula\" or \"upa\"");

    Sector sector = Sector::full_sphere();
    if (const json *az = find(j, "sector_az_deg"))
    {
        const auto v = as_double_list(*az, path + ".sector_az_deg");
        if (v.size() != 2)
            throw ConfigError(path + ".sector_az_deg", "expected [min, max]");
        sector.az_min_rad = deg2rad(v[0]);
        sector.az_max_rad = deg2rad(v[1]);
    }
    if (const json *el = find(j, "sector_el_deg"))
    {
        const auto v = as_double_list(*el, path + ".sector_el_deg");
        if (v.size() != 2)
            throw ConfigError(path + ".sector_el_deg", "expected [min, max]");
        sector.el_min_rad = deg2rad(v[0]);
        sector.el_max_rad = deg2rad(v[1]);
    }

    const double spacing = get_double(j, path, "spacing_wavelengths", 0.5);
    try
    {
        if (kind == "ula")
            return ArrayGeometry::make_ula(get_uword(j, path, "width", 8), spacing, sector);
        return ArrayGeometry::make_upa(get_uword(j, path, "width", 8), get_uword(j, path, "height", 8), spacing,
                                       sector);
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(path, e.what());
    }
}

inline std::vector<double> parse_snr(const json &j, const std::string &path)
{
    if (j.is_array())
        return as_double_list(j, path);
    if (j.is_object())
    {
        check_keys(j, path, {"start", "stop", "step"});
        const double start = get_double(j, path, "start", 0.0);
        const double stop = get_double(j, path, "stop", 0.0);
        const double step = get_double(j, path, "step", 5.0);
        if (!(step > 0.0) || stop < start)
            throw ConfigError(path, "need start <= stop and step > 0");
        std::vector<double> out;
        for (double s = start; s <= stop + 1e-9; s += step)
            out.push_back(s);
        return out;
    }
    throw ConfigError(path, "expected an array of dB values or {start, stop, step}");
}

} // namespace cfg

// Parses and validates one experiment configuration object. Unknown keys are
// rejected and every violation is reported with its field path.
inline ParsedConfig parse_config(const nlohmann::json &j)
{
    using namespace cfg;
    if (!j.is_object())
        throw ConfigError("", "expected a JSON object");
    check_keys(j, "", {"name", "tx", "rx", "channel", "link", "snr_db", "trials", "seed", "threads", "methods",
                       "feedback", "sweep_angle_spread_deg", "sweep_bits_per_angle", "variants"});

    ParsedConfig out;
    if (const json *v = find(j, "name"))
        out.name = as_string(*v, "name");

    if (!find(j, "tx") || !find(j, "rx"))
        throw ConfigError("", "missing required \"tx\" / \"rx\" array descriptions");
    out.channel.tx = parse_array(*find(j, "tx"), "tx");
    out.channel.rx = parse_array(*find(j, "rx"), "rx");

    if (const json *c = find(j, "channel"))
    {
        if (!c->is_object())
            throw ConfigError("channel", "expected an object");
        check_keys(*c, "channel", {"clusters", "rays_per_cluster", "angle_spread_deg", "cluster_powers"});
        out.channel.n_clusters = get_uword(*c, "channel", "clusters", 8);
        out.channel.n_rays = get_uword(*c, "channel", "rays_per_cluster", 10);
        out.channel.angle_spread_rad = deg2rad(get_double(*c, "channel", "angle_spread_deg", 7.5));
        if (const json *p = find(*c, "cluster_powers"))
        {
            if (p->is_string())
            {
                if (as_string(*p, "channel.cluster_powers") != "equal")
                    throw ConfigError("channel.cluster_powers", "expected \"equal\" or an array of powers");
            }
            else
            {
                const auto v = as_double_list(*p, "channel.cluster_powers");
                out.channel.cluster_powers = arma::vec(v);
            }
        }
    }
    else
    {
        out.channel.n_clusters = 8;
        out.channel.n_rays = 10;
        out.channel.angle_spread_rad = deg2rad(7.5);
    }

    const json *link = find(j, "link");
    if (!link)
        throw ConfigError("", "missing required \"link\" section");
    if (!link->is_object())
        throw ConfigError("link", "expected an object");
    check_keys(*link, "link", {"rf_chains_tx", "rf_chains_rx", "streams", "power_allocation", "max_steering_subsets"});
    out.n_rf_tx = get_uword(*link, "link", "rf_chains_tx", 4);
    out.n_rf_rx = get_uword(*link, "link", "rf_chains_rx", 4);
    out.max_steering_subsets = get_uword(*link, "link", "max_steering_subsets", 100000);
    if (const json *pa = find(*link, "power_allocation"))
    {
        const std::string s = as_string(*pa, "link.power_allocation");
        if (s == "waterfilling")
            out.waterfill = true;
        else if (s != "equal")
            throw ConfigError("link.power_allocation", "expected \"equal\" or \"waterfilling\"");
    }
    if (const json *st = find(*link, "streams"))
    {
        out.ns_list.clear();
        if (st->is_string())
        {
            if (as_string(*st, "link.streams") != "adaptive")
                throw ConfigError("link.streams", "expected an integer, an array of integers, or \"adaptive\"");
            out.ns_list.push_back(0);
        }
        else if (st->is_array())
        {
            for (std::size_t i = 0; i < st->size(); ++i)
                out.ns_list.push_back(as_uword((*st)[i], "link.streams[" + std::to_string(i) + "]"));
        }
        else
        {
            out.ns_list.push_back(as_uword(*st, "link.streams"));
        }
    }

    if (const json *s = find(j, "snr_db"))
        out.snr_db = parse_snr(*s, "snr_db");
    out.trials = get_uword(j, "", "trials", 100);
    out.threads = std::max<arma::uword>(1, get_uword(j, "", "threads", 1));
    if (const json *s = find(j, "seed"))
        out.seed = std::uint64_t(as_uword(*s, "seed"));

    if (const json *m = find(j, "methods"))
    {
        if (!m->is_array() || m->empty())
            throw ConfigError("methods", "expected a non-empty array of method names");
        for (std::size_t i = 0; i < m->size(); ++i)
        {
            const std::string path = "methods[" + std::to_string(i) + "]";
            try
            {
                out.methods.push_back(method_from_name(as_string((*m)[i], path)));
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(path, e.what());
            }
        }
    }
    else
    {
        out.methods = {Method::optimal_unconstrained, Method::sparse_hybrid};
    }

    if (const json *f = find(j, "feedback"))
    {
        if (!f->is_object())
            throw ConfigError("feedback", "expected an object");
        check_keys(*f, "feedback",
                   {"bits_az", "bits_el", "bb_bits", "training_samples", "codebook_file"});
        out.feedback.bits_az = get_uword(*f, "feedback", "bits_az", 3);
        out.feedback.bits_el = get_uword(*f, "feedback", "bits_el", 3);
        out.feedback.bb_bits = get_uword(*f, "feedback", "bb_bits", 4);
        out.feedback.training_samples = get_uword(*f, "feedback", "training_samples", 10000);
        if (const json *cf = find(*f, "codebook_file"))
            out.codebook_file = as_string(*cf, "feedback.codebook_file");
    }

    if (const json *sw = find(j, "sweep_angle_spread_deg"))
        out.sweep_angle_spread_deg = cfg::as_double_list(*sw, "sweep_angle_spread_deg");
    if (const json *sw = find(j, "sweep_bits_per_angle"))
    {
        if (!sw->is_array() || sw->empty())
            throw ConfigError("sweep_bits_per_angle", "expected a non-empty array of bit counts");
        for (std::size_t i = 0; i < sw->size(); ++i)
            out.sweep_bits_per_angle.push_back(
                cfg::as_uword((*sw)[i], "sweep_bits_per_angle[" + std::to_string(i) + "]"));
    }
    if (!out.sweep_angle_spread_deg.empty() && !out.sweep_bits_per_angle.empty())
        throw ConfigError("sweep_bits_per_angle", "only one outer sweep may be configured");

    // cross-field validation
    try
    {
        out.channel.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError("channel", e.what());
    }
    if (out.n_rf_tx < 1 || out.n_rf_tx > out.channel.tx.size())
        throw ConfigError("link.rf_chains_tx", "need 1 <= rf_chains_tx <= transmit antenna count");
    if (out.n_rf_rx < 1 || out.n_rf_rx > out.channel.rx.size())
        throw ConfigError("link.rf_chains_rx", "need 1 <= rf_chains_rx <= receive antenna count");
    if (out.ns_list.empty())
        throw ConfigError("link.streams", "expected at least one stream count");
    for (arma::uword ns : out.ns_list)
    {
        if (ns == 0 && !out.waterfill)
            throw ConfigError("link.streams", "adaptive streams require power_allocation = \"waterfilling\"");
        if (ns > std::min(out.n_rf_tx, out.n_rf_rx))
            throw ConfigError("link.streams", "streams must satisfy ns <= min(rf_chains_tx, rf_chains_rx)");
    }
    const bool quantized = std::find(out.methods.begin(), out.methods.end(), Method::quantized_sparse_hybrid) !=
                           out.methods.end();
    if (quantized && !find(j, "feedback"))
        throw ConfigError("feedback", "the quantized-sparse-hybrid method requires a feedback section");
    if (quantized && !out.codebook_file.empty() && !out.sweep_bits_per_angle.empty())
        throw ConfigError("feedback.codebook_file", "a fixed codebook file cannot be combined with a bits sweep");
    if (out.trials < 1)
        throw ConfigError("trials", "need trials >= 1");
    return out;
}

// ---- JSON serializations ----------------------------------------------------------

inline nlohmann::json complex_matrix_to_json(const arma::cx_mat &m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (arma::uword r = 0; r < m.n_rows; ++r)
    {
        nlohmann::json row = nlohmann::json::array();
        for (arma::uword c = 0; c < m.n_cols; ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline arma::cx_mat complex_matrix_from_json(const nlohmann::json &j, const std::string &path)
{
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(path, "expected an array of rows of [re, im] pairs");
    arma::cx_mat m(j.size(), j[0].size());
    for (std::size_t r = 0; r < j.size(); ++r)
    {
        if (j[r].size() != m.n_cols)
            throw ConfigError(path, "ragged matrix rows");
        for (std::size_t c = 0; c < j[r].size(); ++c)
        {
            const auto &e = j[r][c];
            if (!e.is_array() || e.size() != 2)
                throw ConfigError(path, "matrix entries must be [re, im] pairs");
            m(r, c) = arma::cx_double(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

// One channel realization as a self-describing JSON object (used by the
// channel dump tool, one object per line).
inline nlohmann::json channel_to_json(const ChannelRealization &real)
{
    nlohmann::json rays = nlohmann::json::array();
    for (const Ray &r : real.rays)
        rays.push_back({{"cluster", r.cluster},
                        {"ray", r.ray},
                        {"gain", {r.gain.real(), r.gain.imag()}},
                        {"aod_az_rad", r.aod_az_rad},
                        {"aod_el_rad", r.aod_el_rad},
                        {"aoa_az_rad", r.aoa_az_rad},
                        {"aoa_el_rad", r.aoa_el_rad},
                        {"tx_gain", r.tx_gain},
                        {"rx_gain", r.rx_gain}});
    return {{"n_rx", real.h.n_rows},
            {"n_tx", real.h.n_cols},
            {"clusters", real.params.n_clusters},
            {"rays_per_cluster", real.params.n_rays},
            {"angle_spread_deg", rad2deg(real.params.angle_spread_rad)},
            {"rays", std::move(rays)},
            {"h", complex_matrix_to_json(real.h)}};
}

// Trained feedback codebook file: quantizer geometry plus the row-major
// complex entries of the baseband subspace codebook.
inline nlohmann::json feedback_codebook_to_json(const FeedbackConfig &fc)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const auto &e : fc.bb.entries)
        entries.push_back(complex_matrix_to_json(e));
    return {{"type", "hybeam-feedback-codebook"},
            {"bits_az", fc.angles.bits_az},
            {"bits_el", fc.angles.bits_el},
            {"sector_az_deg", {rad2deg(fc.angles.sector.az_min_rad), rad2deg(fc.angles.sector.az_max_rad)}},
            {"sector_el_deg", {rad2deg(fc.angles.sector.el_min_rad), rad2deg(fc.angles.sector.el_max_rad)}},
            {"bb_bits", fc.bb.bits},
            {"rows", fc.bb.entries.empty() ? 0 : fc.bb.entries[0].n_rows},
            {"cols", fc.bb.entries.empty() ? 0 : fc.bb.entries[0].n_cols},
            {"entries", std::move(entries)}};
}

inline FeedbackConfig feedback_codebook_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || !j.contains("type") || j["type"] != "hybeam-feedback-codebook")
        throw ConfigError("type", "not a hybeam feedback codebook file");
    for (const char *key : {"bits_az", "bits_el", "sector_az_deg", "sector_el_deg", "bb_bits", "entries"})
        if (!j.contains(key))
            throw ConfigError(key, "missing key in codebook file");
    Sector sector;
    sector.az_min_rad = deg2rad(j["sector_az_deg"][0].get<double>());
    sector.az_max_rad = deg2rad(j["sector_az_deg"][1].get<double>());
    sector.el_min_rad = deg2rad(j["sector_el_deg"][0].get<double>());
    sector.el_max_rad = deg2rad(j["sector_el_deg"][1].get<double>());
    FeedbackConfig fc;
    fc.angles = angle_codebook(j["bits_az"].get<arma::uword>(), j["bits_el"].get<arma::uword>(), sector);
    fc.bb.bits = j["bb_bits"].get<arma::uword>();
    const auto &entries = j["entries"];
    if (!entries.is_array() || entries.size() != (std::size_t(1) << fc.bb.bits))
        throw ConfigError("entries", "codebook must have exactly 2^bb_bits entries");
    for (std::size_t i = 0; i < entries.size(); ++i)
        fc.bb.entries.push_back(complex_matrix_from_json(entries[i], "entries[" + std::to_string(i) + "]"));
    return fc;
}

// ---- Named experiments --------------------------------------------------------------

// Desk-scale named experiment configurations. Each returns a plain config
// object (the same schema run-config accepts), so a named run and a custom
// run of the same object are byte-identical.
inline nlohmann::json named_experiment_json(const std::string &name)
{
    using json = nlohmann::json;
    const json tx_64 = {{"array", "upa"}, {"width", 8},  {"height", 8},
                        {"sector_az_deg", {-30.0, 30.0}}, {"sector_el_deg", {80.0, 100.0}}};
    const json rx_16 = {{"array", "upa"}, {"width", 4}, {"height", 4}};
    const json tx_256 = {{"array", "upa"}, {"width", 16}, {"height", 16},
                         {"sector_az_deg", {-30.0, 30.0}}, {"sector_el_deg", {80.0, 100.0}}};
    const json rx_64 = {{"array", "upa"}, {"width", 8}, {"height", 8}};

    if (name == "fig2")
        return {{"name", "fig2"},
                {"tx", tx_64},
                {"rx", rx_16},
                {"channel", {{"clusters", 8}, {"rays_per_cluster", 10}, {"angle_spread_deg", 7.5}}},
                {"link", {{"rf_chains_tx", 4}, {"rf_chains_rx", 4}, {"streams", {1, 2}}}},
                {"snr_db", {{"start", -30.0}, {"stop", 10.0}, {"step", 5.0}}},
                {"trials", 500},
                {"seed", 12345},
                {"methods", {"optimal-unconstrained", "sparse-hybrid", "beam-steering"}}};
    if (name == "fig3")
        return {{"name", "fig3"},
                {"tx", tx_256},
                {"rx", rx_64},
                {"channel", {{"clusters", 8}, {"rays_per_cluster", 10}, {"angle_spread_deg", 7.5}}},
                {"link", {{"rf_chains_tx", 6}, {"rf_chains_rx", 6}, {"streams", {1, 2}}}},
                {"snr_db", {{"start", -40.0}, {"stop", 0.0}, {"step", 5.0}}},
                {"trials", 500},
                {"seed", 12345},
                {"methods", {"optimal-unconstrained", "sparse-hybrid", "beam-steering"}}};
    if (name == "fig4")
        return {{"name", "fig4"},
                {"tx", tx_256},
                {"rx", rx_64},
                {"channel", {{"clusters", 8}, {"rays_per_cluster", 10}, {"angle_spread_deg", 7.5}}},
                {"link",
                 {{"rf_chains_tx", 4}, {"rf_chains_rx", 4}, {"streams", "adaptive"},
                  {"power_allocation", "waterfilling"}}},
                {"snr_db", {{"start", -40.0}, {"stop", 0.0}, {"step", 5.0}}},
                {"trials", 200},
                {"seed", 12345},
                {"methods", {"waterfilling-capacity", "sparse-hybrid", "beam-steering"}}};
    if (name == "fig5")
        return {{"name", "fig5"},
                {"tx", tx_64},
                {"rx", rx_16},
                {"channel", {{"clusters", 8}, {"rays_per_cluster", 10}}},
                {"link", {{"rf_chains_tx", 4}, {"rf_chains_rx", 4}, {"streams", 1}}},
                {"snr_db", {0.0}},
                {"trials", 200},
                {"seed", 12345},
                {"methods", {"optimal-unconstrained", "sparse-hybrid"}},
                {"sweep_angle_spread_deg", {0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0}},
                {"variants",
                 {{{"label", "64x16-rf4-ns1"}},
                  {{"label", "64x16-rf4-ns2"}, {"link", {{"streams", 2}}}},
                  {{"label", "64x16-rf6-ns2"},
                   {"link", {{"rf_chains_tx", 6}, {"rf_chains_rx", 6}, {"streams", 2}}}},
                  {{"label", "256x64-rf6-ns1"},
                   {"tx", {{"width", 16}, {"height", 16}}},
                   {"rx", {{"width", 8}, {"height", 8}}},
                   {"link", {{"rf_chains_tx", 6}, {"rf_chains_rx", 6}}}}}}};
    if (name == "fig6")
        return {{"name", "fig6"},
                {"tx", tx_64},
                {"rx", rx_16},
                {"channel", {{"clusters", 8}, {"rays_per_cluster", 10}, {"angle_spread_deg", 7.5}}},
                {"link", {{"rf_chains_tx", 4}, {"rf_chains_rx", 4}, {"streams", 1}}},
                {"snr_db", {0.0}},
                {"trials", 500},
                {"seed", 12345},
                {"methods", {"sparse-hybrid", "quantized-sparse-hybrid"}},
                {"feedback", {{"bb_bits", 4}, {"training_samples", 10000}}},
                {"sweep_bits_per_angle", {1, 2, 3, 4}},
                {"variants",
                 {{{"label", "ns1"}},
                  {{"label", "ns2"}, {"link", {{"streams", 2}}}, {"feedback", {{"bb_bits", 6}}}}}}};
    throw ConfigError("name", "unknown named experiment '" + name +
                                  "' (expected fig2, fig3, fig4, fig5, fig6, or beampattern)");
}

// ---- Runner -----------------------------------------------------------------------

struct ExperimentOutput
{
    std::vector<RatePoint> points;
    std::string csv;
    nlohmann::json manifest;
};

namespace detail {

inline std::string spread_tag(double deg)
{
    char buf[48];
    std::snprintf(buf, sizeof(buf), "spread=%g", deg);
    return buf;
}

inline SweepConfig to_sweep(const ParsedConfig &pc, const std::string &tag)
{
    SweepConfig sc;
    sc.channel = pc.channel;
    sc.snr_db = pc.snr_db;
    sc.methods = pc.methods;
    sc.n_rf_tx = pc.n_rf_tx;
    sc.n_rf_rx = pc.n_rf_rx;
    sc.ns_list = pc.ns_list;
    sc.waterfill = pc.waterfill;
    sc.trials = pc.trials;
    sc.seed = pc.seed;
    sc.threads = pc.threads;
    sc.feedback = pc.feedback;
    sc.steering.max_subsets = pc.max_steering_subsets;
    sc.tag = tag;
    return sc;
}

// Runs one fully-resolved variant (no "variants" key), expanding an outer
// angle-spread or bits-per-angle sweep into tagged sub-sweeps.
inline void run_variant(const ParsedConfig &pc, const std::string &label, std::vector<RatePoint> &sink)
{
    auto join_tag = [&](const std::string &extra) {
        if (label.empty())
            return extra;
        return extra.empty() ? label : label + "," + extra;
    };

    if (!pc.sweep_angle_spread_deg.empty())
    {
        for (double spread : pc.sweep_angle_spread_deg)
        {
            SweepConfig sc = to_sweep(pc, join_tag(spread_tag(spread)));
            sc.channel.angle_spread_rad = deg2rad(spread);
            const SweepResult r = sweep(sc);
            sink.insert(sink.end(), r.points.begin(), r.points.end());
        }
        return;
    }
    if (!pc.sweep_bits_per_angle.empty())
    {
        for (arma::uword bits : pc.sweep_bits_per_angle)
        {
            SweepConfig sc = to_sweep(pc, join_tag("bits=" + std::to_string(bits)));
            sc.feedback.bits_az = bits;
            sc.feedback.bits_el = bits;
            const SweepResult r = sweep(sc);
            sink.insert(sink.end(), r.points.begin(), r.points.end());
        }
        return;
    }
    SweepConfig sc = to_sweep(pc, label);
    const SweepResult r = sweep(sc);
    sink.insert(sink.end(), r.points.begin(), r.points.end());
}

} // namespace detail

// Runs a configuration object: validates, expands variants and outer sweeps,
// and renders the CSV plus a manifest that embeds the resolved config (so
// `run-config <manifest>` reproduces the run).
inline ExperimentOutput run_experiment_json(const nlohmann::json &config)
{
    if (!config.is_object())
        throw ConfigError("", "expected a JSON object");

    // allow passing a manifest back in
    if (config.contains("config") && config.contains("tool"))
        return run_experiment_json(config["config"]);

    nlohmann::json base = config;
    std::vector<std::pair<std::string, nlohmann::json>> variants;
    if (const auto it = base.find("variants"); it != base.end())
    {
        if (!it->is_array() || it->empty())
            throw ConfigError("variants", "expected a non-empty array of override objects");
        for (std::size_t i = 0; i < it->size(); ++i)
        {
            nlohmann::json patch = (*it)[i];
            if (!patch.is_object())
                throw ConfigError("variants[" + std::to_string(i) + "]", "expected an object");
            std::string label = "v" + std::to_string(i);
            if (patch.contains("label"))
            {
                label = cfg::as_string(patch["label"], "variants[" + std::to_string(i) + "].label");
                patch.erase("label");
            }
            nlohmann::json merged = base;
            merged.erase("variants");
            merged.merge_patch(patch);
            variants.emplace_back(label, std::move(merged));
        }
        base.erase("variants");
    }
    else
    {
        variants.emplace_back("", base);
    }

    ExperimentOutput out;
    for (const auto &[label, vj] : variants)
    {
        ParsedConfig pc = parse_config(vj);
        if (!pc.codebook_file.empty())
        {
            std::ifstream in(pc.codebook_file);
            if (!in)
                throw ConfigError("feedback.codebook_file", "cannot open '" + pc.codebook_file + "'");
            nlohmann::json cj;
            in >> cj;
            const FeedbackConfig fc = feedback_codebook_from_json(cj);
            pc.feedback.bits_az = fc.angles.bits_az;
            pc.feedback.bits_el = fc.angles.bits_el;
            pc.feedback.bb_bits = fc.bb.bits;
            pc.feedback.pretrained = fc.bb;
        }
        detail::run_variant(pc, label, out.points);
    }
    out.csv = rate_table_csv(out.points);
    out.manifest = {{"tool", "hybeam"}, {"version", version}, {"kind", "rate-sweep"}, {"config", config}};
    return out;
}

inline ExperimentOutput run_named_experiment(const std::string &name)
{
    return run_experiment_json(named_experiment_json(name));
}

// ---- Beam pattern experiment ---------------------------------------------------------

struct BeamPatternOutput
{
    // per-method pattern CSVs (az_deg, el_deg, gain_db), az-major row order
    std::string csv_optimal;
    std::string csv_hybrid;
    std::string csv_steering;
    nlohmann::json manifest;
};

// Beam patterns of the unconstrained single-stream beamformer, the 4-chain
// hybrid approximation, and the best single-ray steering vector, for one
// random 256x16 channel with 6 single-direction clusters.
inline BeamPatternOutput run_beampattern(std::uint64_t seed, double az_step_deg = 1.0, double el_step_deg = 1.0)
{
    if (!(az_step_deg > 0.0) || !(el_step_deg > 0.0))
        throw ConfigError("grid", "grid steps must be > 0");

    ChannelParams params;
    params.tx = ArrayGeometry::make_upa(16, 16, 0.5,
                                        Sector{deg2rad(-30), deg2rad(30), deg2rad(80), deg2rad(100)});
    params.rx = ArrayGeometry::make_upa(4, 4, 0.5);
    params.n_clusters = 6;
    params.n_rays = 10;
    params.angle_spread_rad = 0.0;

    RandomStream rng = RandomStream(seed).substream(0, 0);
    const ChannelRealization real = sample_channel(params, rng);

    const UnconstrainedPrecoder opt = optimal_precoder(real.h, 1);
    const HybridPrecoder hyb = sparse_precoder_omp(opt.f_opt, response_dictionary(real, LinkSide::tx), 4);
    const BeamSteering steer = beam_steering_baseline(real, 1, 1.0, 1);

    const arma::vec az = arma::regspace(-90.0, az_step_deg, 90.0);
    const arma::vec el = arma::regspace(50.0, el_step_deg, 130.0);

    auto render = [&](const arma::cx_vec &f) {
        const arma::mat g = beam_pattern(params.tx, f, deg2rad(1.0) * az, deg2rad(1.0) * el);
        std::string csv = "az_deg,el_deg,gain_db\n";
        for (arma::uword i = 0; i < az.n_elem; ++i)
            for (arma::uword j = 0; j < el.n_elem; ++j)
            {
                csv += detail::format_double(az(i));
                csv += ',' + detail::format_double(el(j));
                csv += ',' + detail::format_double(lin2db(std::max(g(i, j), 1e-12)));
                csv += '\n';
            }
        return csv;
    };

    BeamPatternOutput out;
    out.csv_optimal = render(opt.f_opt.col(0));
    out.csv_hybrid = render(arma::cx_vec(hyb.combined().col(0)));
    out.csv_steering = render(arma::cx_vec(steer.f.col(0)));
    out.manifest = {{"tool", "hybeam"},
                    {"version", version},
                    {"kind", "beampattern"},
                    {"seed", seed},
                    {"az_step_deg", az_step_deg},
                    {"el_step_deg", el_step_deg},
                    {"tx", {{"array", "upa"}, {"width", 16}, {"height", 16},
                            {"sector_az_deg", {-30.0, 30.0}}, {"sector_el_deg", {80.0, 100.0}}}},
                    {"rx", {{"array", "upa"}, {"width", 4}, {"height", 4}}},
                    {"channel", {{"clusters", 6}, {"rays_per_cluster", 10}, {"angle_spread_deg", 0.0}}},
                    {"rf_chains", 4}};
    return out;
}

} // namespace hybeam
