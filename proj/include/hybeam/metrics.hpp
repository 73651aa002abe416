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
// Monte-Carlo rate sweeps: per-SNR/per-method statistics over a common set
// of channel realizations, with deterministic seeding, deterministic
// aggregation (fixed-order pairwise summation, so results do not depend on
// the thread count), and a stable CSV rendering.

#pragma once

#include "feedback.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace hybeam {

// ---- Methods -----------------------------------------------------------------

enum class Method
{
    optimal_unconstrained,   // SVD precoder, unconstrained receiver
    sparse_hybrid,           // matching-pursuit precoder + combiner
    beam_steering,           // best physical-ray steering pair per stream
    quantized_sparse_hybrid, // sparse hybrid precoder through limited feedback
    waterfilling_capacity    // rank-capped waterfilling capacity
};

inline std::string method_name(Method m)
{
    switch (m)
    {
    case Method::optimal_unconstrained:
        return "optimal-unconstrained";
    case Method::sparse_hybrid:
        return "sparse-hybrid";
    case Method::beam_steering:
        return "beam-steering";
    case Method::quantized_sparse_hybrid:
        return "quantized-sparse-hybrid";
    case Method::waterfilling_capacity:
        return "waterfilling-capacity";
    }
    throw std::logic_error("method_name: unknown method");
}

inline Method method_from_name(const std::string &name)
{
    for (Method m : {Method::optimal_unconstrained, Method::sparse_hybrid, Method::beam_steering,
                     Method::quantized_sparse_hybrid, Method::waterfilling_capacity})
        if (method_name(m) == name)
            return m;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected one of: optimal-unconstrained, sparse-hybrid, beam-steering, "
                                "quantized-sparse-hybrid, waterfilling-capacity)");
}

// Rank-capped waterfilling capacity in bits/s/Hz.
inline double waterfilling_capacity_rate(const arma::vec &sv, double snr, arma::uword ns_max)
{
    const Waterfill wf = waterfilling(sv, snr, ns_max);
    double r = 0.0;
    for (arma::uword i = 0; i < wf.ns; ++i)
        r += std::log2(1.0 + (snr / double(wf.ns)) * sv(i) * sv(i) * wf.gamma_sq(i));
    return r;
}

// ---- Deterministic aggregation --------------------------------------------------

namespace detail {

inline double pairwise_sum(const double *x, std::size_t n)
{
    if (n <= 8)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double mean_of(const std::vector<double> &x) { return pairwise_sum(x.data(), x.size()) / double(x.size()); }

inline double median_of(std::vector<double> x)
{
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// half-width of the normal-approximation 95% confidence interval of the mean
inline double ci95_of(const std::vector<double> &x, double mean)
{
    if (x.size() < 2)
        return 0.0;
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        sq[i] = (x[i] - mean) * (x[i] - mean);
    const double var = pairwise_sum(sq.data(), sq.size()) / double(x.size() - 1);
    return 1.96 * std::sqrt(var / double(x.size()));
}

} // namespace detail

// ---- Sweep -------------------------------------------------------------------

struct RatePoint
{
    std::string method;
    double snr_db = 0.0;
    arma::uword ns = 0; // 0 = rank-adaptive
    double rate_mean = 0.0;
    double rate_median = 0.0;
    double rate_ci95 = 0.0;
    arma::uword trials = 0;
    std::uint64_t seed = 0;
};

struct FeedbackSetup
{
    arma::uword bits_az = 3;
    arma::uword bits_el = 3;
    arma::uword bb_bits = 4;
    arma::uword training_samples = 10000;
    std::optional<SubspaceCodebook> pretrained; // skips training when set
};

struct SweepConfig
{
    ChannelParams channel;
    std::vector<double> snr_db{0.0};
    std::vector<Method> methods{Method::optimal_unconstrained, Method::sparse_hybrid};
    arma::uword n_rf_tx = 1;
    arma::uword n_rf_rx = 1;
    std::vector<arma::uword> ns_list{1}; // entry 0 = rank-adaptive via waterfilling
    bool waterfill = false;              // waterfilled power loading (hybrid target & steering)
    arma::uword trials = 100;
    std::uint64_t seed = 1;
    arma::uword threads = 1;
    FeedbackSetup feedback;
    BeamSteeringOptions steering;
    std::string tag; // appended to method names as "method[tag]"
};

struct SweepResult
{
    std::vector<RatePoint> points;             // ns-major, then method, then snr
    std::vector<std::uint64_t> channel_hashes; // per-trial channel fingerprints
};

// Trains the baseband subspace codebook on the precoder distribution induced
// by the channel parameters: each training sample is the orthonormal
// baseband matrix selected by the unitary matching-pursuit precoder over the
// quantized steering dictionary for an independent channel draw.
inline SubspaceCodebook train_codebook_for_channel(const ChannelParams &params, arma::uword n_rf, arma::uword ns,
                                                   const AngleCodebook &angles, arma::uword bb_bits,
                                                   arma::uword n_samples, std::uint64_t seed)
{
    params.validate();
    if (n_samples < (arma::uword(1) << bb_bits))
        throw std::invalid_argument("train_codebook_for_channel: need at least 2^bb_bits training samples");
    const arma::cx_mat dict = quantized_dictionary(angles, params.tx);
    OmpOptions omp;
    omp.unitary_bb = true;
    const RandomStream root(seed);
    std::vector<arma::cx_mat> training;
    training.reserve(n_samples);
    for (arma::uword j = 0; j < n_samples; ++j)
    {
        RandomStream rng = root.substream(2, j);
        const ChannelRealization real = sample_channel(params, rng);
        const UnconstrainedPrecoder opt = optimal_precoder(real.h, ns);
        const HybridPrecoder sel = sparse_precoder_omp(opt.f_opt, dict, n_rf, omp);
        training.push_back(sel.f_bb * (std::sqrt(double(ns)) / arma::norm(sel.f_bb, "fro")));
    }
    return train_bb_codebook(training, bb_bits);
}

namespace detail {

// Per-trial evaluation context; caches the channel SVD so every method and
// SNR point reuses it.
struct TrialEval
{
    const SweepConfig &cfg;
    const ChannelRealization real;
    const std::map<arma::uword, FeedbackConfig> &feedback;
    UnconstrainedPrecoder opt; // full phase-fixed right singular basis
    arma::cx_mat at, ar;       // ray dictionaries

    TrialEval(const SweepConfig &c, ChannelRealization r, const std::map<arma::uword, FeedbackConfig> &fb,
              arma::uword max_ns)
        : cfg(c), real(std::move(r)), feedback(fb)
    {
        opt = optimal_precoder(real.h, max_ns);
        at = response_dictionary(real, LinkSide::tx);
        ar = response_dictionary(real, LinkSide::rx);
    }

    arma::uword rank_cap() const { return std::min(cfg.n_rf_tx, cfg.n_rf_rx); }

    // ns as configured, or per-(trial, snr) waterfilling choice when adaptive
    arma::uword effective_ns(arma::uword ns, double snr) const
    {
        return ns != 0 ? ns : waterfilling(opt.singular_values, snr, rank_cap()).ns;
    }

    double eval(Method m, arma::uword ns, double snr) const
    {
        const bool adaptive = ns == 0;
        switch (m)
        {
        case Method::optimal_unconstrained:
        {
            const arma::uword n = effective_ns(ns, snr);
            return mutual_information(real.h, arma::cx_mat(opt.f_opt.cols(0, n - 1)), snr, n);
        }
        case Method::waterfilling_capacity:
            return waterfilling_capacity_rate(opt.singular_values, snr, adaptive ? rank_cap() : ns);
        case Method::sparse_hybrid:
        {
            LinkOptions lo;
            lo.n_rf_tx = cfg.n_rf_tx;
            lo.n_rf_rx = cfg.n_rf_rx;
            lo.ns = adaptive ? rank_cap() : ns;
            lo.waterfill = cfg.waterfill || adaptive;
            lo.tx_dictionary = &at;
            lo.rx_dictionary = &ar;
            lo.opt_cache = &opt;
            const LinkDesign d = design_link(real, snr, lo);
            return spectral_efficiency(real.h, d.precoder.combined(), d.combiner.combined(), snr, d.ns);
        }
        case Method::beam_steering:
        {
            arma::uword n = effective_ns(ns, snr);
            // shrink to the largest subset size the exhaustive search allows
            while (n > 1 && subset_count(real.rays.size(), n) > double(cfg.steering.max_subsets))
                --n;
            BeamSteeringOptions bo = cfg.steering;
            bo.waterfill = cfg.waterfill || adaptive;
            return beam_steering_baseline(real, n, snr, rank_cap(), bo).rate;
        }
        case Method::quantized_sparse_hybrid:
        {
            const FeedbackConfig &fb = feedback.at(ns);
            const FeedbackResult fr = feedback_roundtrip(real, cfg.n_rf_tx, ns, fb);
            const SignalModel model{real.h, fr.precoder.combined(), snr, ns};
            const HybridCombiner comb = sparse_combiner_omp(model, ar, cfg.n_rf_rx);
            return spectral_efficiency(real.h, fr.precoder.combined(), comb.combined(), snr, ns);
        }
        }
        throw std::logic_error("eval: unknown method");
    }
};

} // namespace detail

// Runs the Monte-Carlo sweep. Every method and SNR point of a trial consumes
// the identical channel realization (common random numbers; the per-trial
// channel hash is returned so callers can assert the discipline), trial t
// always uses substream (0, t) of the master seed, and aggregation order is
// fixed, so the result is reproducible and independent of `threads`.
inline SweepResult sweep(const SweepConfig &cfg)
{
    cfg.channel.validate();
    if (cfg.trials < 1)
        throw std::invalid_argument("sweep: need trials >= 1");
    if (cfg.snr_db.empty())
        throw std::invalid_argument("sweep: empty snr list");
    if (cfg.methods.empty())
        throw std::invalid_argument("sweep: empty method list");
    if (cfg.ns_list.empty())
        throw std::invalid_argument("sweep: empty ns list");
    if (cfg.n_rf_tx < 1 || cfg.n_rf_rx < 1 || cfg.n_rf_tx > cfg.channel.tx.size() ||
        cfg.n_rf_rx > cfg.channel.rx.size())
        throw std::invalid_argument("sweep: RF chains must satisfy 1 <= n_rf <= antenna count per side");
    arma::uword max_ns = 1;
    for (arma::uword ns : cfg.ns_list)
    {
        if (ns == 0 && !cfg.waterfill)
            throw std::invalid_argument("sweep: rank-adaptive streams require waterfilling power allocation");
        if (ns > std::min(cfg.n_rf_tx, cfg.n_rf_rx))
            throw std::invalid_argument("sweep: streams must satisfy ns <= min(n_rf_tx, n_rf_rx)");
        max_ns = std::max(max_ns, ns == 0 ? std::min(cfg.n_rf_tx, cfg.n_rf_rx) : ns);
    }

    const bool quantized = std::find(cfg.methods.begin(), cfg.methods.end(), Method::quantized_sparse_hybrid) !=
                           cfg.methods.end();
    std::map<arma::uword, FeedbackConfig> feedback;
    if (quantized)
    {
        const AngleCodebook angles =
            angle_codebook(cfg.feedback.bits_az, cfg.feedback.bits_el, cfg.channel.tx.sector);
        for (arma::uword ns : cfg.ns_list)
        {
            if (ns == 0)
                throw std::invalid_argument("sweep: the quantized method requires a fixed stream count");
            FeedbackConfig fc;
            fc.angles = angles;
            fc.bb = cfg.feedback.pretrained
                        ? *cfg.feedback.pretrained
                        : train_codebook_for_channel(cfg.channel, cfg.n_rf_tx, ns, angles, cfg.feedback.bb_bits,
                                                     cfg.feedback.training_samples, cfg.seed);
            if (fc.bb.entries[0].n_rows != cfg.n_rf_tx || fc.bb.entries[0].n_cols != ns)
                throw std::invalid_argument("sweep: baseband codebook entries must be n_rf_tx x ns");
            feedback.emplace(ns, std::move(fc));
        }
    }

    const std::size_t slots = cfg.ns_list.size() * cfg.methods.size() * cfg.snr_db.size();
    std::vector<std::vector<double>> rates(slots, std::vector<double>(cfg.trials));
    std::vector<std::uint64_t> hashes(cfg.trials);
    const RandomStream root(cfg.seed);

    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto run_trials = [&](arma::uword start, arma::uword stride) {
        try
        {
            for (arma::uword t = start; t < cfg.trials; t += stride)
            {
                RandomStream rng = root.substream(0, t);
                detail::TrialEval ev(cfg, sample_channel(cfg.channel, rng), feedback, max_ns);
                hashes[t] = hash_matrix(ev.real.h);
                std::size_t slot = 0;
                for (arma::uword ns : cfg.ns_list)
                    for (Method m : cfg.methods)
                        for (double snr_db : cfg.snr_db)
                            rates[slot++][t] = ev.eval(m, ns, db2lin(snr_db));
            }
        }
        catch (...)
        {
            std::lock_guard<std::mutex> lk(err_mutex);
            if (!first_error)
                first_error = std::current_exception();
        }
    };

    const arma::uword nthreads = std::max<arma::uword>(1, std::min<arma::uword>(cfg.threads, cfg.trials));
    if (nthreads == 1)
    {
        run_trials(0, 1);
    }
    else
    {
        std::vector<std::thread> pool;
        for (arma::uword w = 0; w < nthreads; ++w)
            pool.emplace_back(run_trials, w, nthreads);
        for (auto &th : pool)
            th.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    SweepResult out;
    out.channel_hashes = std::move(hashes);
    std::size_t slot = 0;
    for (arma::uword ns : cfg.ns_list)
        for (Method m : cfg.methods)
            for (double snr_db : cfg.snr_db)
            {
                const std::vector<double> &r = rates[slot++];
                RatePoint p;
                p.method = method_name(m) + (cfg.tag.empty() ? "" : "[" + cfg.tag + "]");
                p.snr_db = snr_db;
                p.ns = ns;
                p.rate_mean = detail::mean_of(r);
                p.rate_median = detail::median_of(r);
                p.rate_ci95 = detail::ci95_of(r, p.rate_mean);
                p.trials = cfg.trials;
                p.seed = cfg.seed;
                out.points.push_back(std::move(p));
            }
    return out;
}

// ---- CSV rendering -----------------------------------------------------------

namespace detail {

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

inline std::string rate_table_csv(const std::vector<RatePoint> &rows)
{
    std::string out = "method,snr_db,ns,rate_mean,rate_median,rate_ci95,trials,seed\n";
    for (const RatePoint &p : rows)
    {
        out += p.method;
        out += ',' + detail::format_double(p.snr_db);
        out += ',' + std::to_string(p.ns);
        out += ',' + detail::format_double(p.rate_mean);
        out += ',' + detail::format_double(p.rate_median);
        out += ',' + detail::format_double(p.rate_ci95);
        out += ',' + std::to_string(p.trials);
        out += ',' + std::to_string(p.seed);
        out += '\n';
    }
    return out;
}

} // namespace hybeam
