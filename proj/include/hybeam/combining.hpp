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
// Receive-side design: the received-signal second-order model, the linear
// MMSE combiner, hybrid RF/baseband combining via covariance-weighted
// matching pursuit, and the combined transmit/receive link design with its
// ordering rule.
//
// Signal model: y = sqrt(rho) H F s + n with E[s s^H] = I/Ns, noise
// variance 1 (so rho = snr), F the combined transmit precoder.

#pragma once

#include "precoding.hpp"

namespace hybeam {

struct SignalModel
{
    arma::cx_mat h; // Nr x Nt
    arma::cx_mat f; // Nt x Ns, combined precoder (includes any power loading)
    double snr = 1.0;
    arma::uword ns = 1;

    void validate() const
    {
        if (h.n_rows < 1 || h.n_cols < 1 || f.n_cols < 1)
            throw std::invalid_argument("SignalModel: empty channel or precoder");
        if (h.n_cols != f.n_rows)
            throw std::invalid_argument("SignalModel: channel/precoder dimension mismatch");
        if (ns < 1 || !(snr > 0.0))
            throw std::invalid_argument("SignalModel: need ns >= 1 and snr > 0");
    }
};

// Received-signal covariance E[y y^H] = snr/Ns * (HF)(HF)^H + I.
inline arma::cx_mat rx_covariance(const SignalModel &m)
{
    m.validate();
    const arma::cx_mat hf = m.h * m.f;
    arma::cx_mat eyy = (m.snr / double(m.ns)) * (hf * hf.t());
    eyy.diag() += 1.0;
    return 0.5 * (eyy + eyy.t());
}

// Linear MMSE combiner, computed through the small Ns x Ns system
//   W = 1/sqrt(rho) * HF * ((HF)^H (HF) + Ns/rho * I)^{-1} .
inline arma::cx_mat mmse_combiner(const SignalModel &m)
{
    m.validate();
    const arma::cx_mat hf = m.h * m.f;
    arma::cx_mat inner = hf.t() * hf;
    inner.diag() += double(m.ns) / m.snr;
    inner = 0.5 * (inner + inner.t());
    return (1.0 / std::sqrt(m.snr)) * arma::cx_mat(arma::solve(inner, hf.t())).t();
}

// The same combiner through the Nr x Nr received covariance,
//   W = sqrt(rho)/Ns * E[y y^H]^{-1} (HF) ;
// equal to mmse_combiner() by the matrix inversion lemma. Kept as an
// independent route for verification.
inline arma::cx_mat mmse_combiner_cov_form(const SignalModel &m)
{
    const arma::cx_mat eyy = rx_covariance(m);
    const arma::cx_mat hf = m.h * m.f;
    return (std::sqrt(m.snr) / double(m.ns)) * arma::solve(eyy, hf);
}

// Mean squared symbol estimation error E||s - W^H y||^2 in closed form.
inline double mse(const SignalModel &m, const arma::cx_mat &w)
{
    m.validate();
    if (w.n_rows != m.h.n_rows || w.n_cols != m.f.n_cols)
        throw std::invalid_argument("mse: combiner dimension mismatch");
    const arma::cx_mat hf = m.h * m.f;
    const arma::cx_mat eyy = rx_covariance(m);
    const double cross = std::real(arma::trace(w.t() * hf)) * std::sqrt(m.snr) / double(m.ns);
    const double quad = std::real(arma::trace(w.t() * eyy * w));
    return 1.0 - 2.0 * cross + quad;
}

struct HybridCombiner
{
    arma::cx_mat w_rf; // Nr x n_rf, columns drawn from the dictionary
    arma::cx_mat w_bb; // n_rf x Ns
    std::vector<arma::uword> selected;
    arma::vec weighted_residual_history; // ||E^{1/2}(W_mmse - W_rf W_bb)||_F per iteration
    arma::uword duplicate_selections = 0;

    arma::cx_mat combined() const { return w_rf * w_bb; }
};

// Greedy sparse approximation of the MMSE combiner by n_rf dictionary
// columns, weighted by the received covariance E[y y^H]:
//
//   repeat n_rf times:
//     k    = argmax_l diag(Psi Psi^H),  Psi = A^H E[yy^H] W_res
//     W_rf = [W_rf | a_k]
//     W_bb = (W_rf^H E W_rf)^{-1} W_rf^H E W_mmse      (weighted LS)
//     W_res = (W_mmse - W_rf W_bb) / ||W_mmse - W_rf W_bb||_F
//
// No power rescaling afterwards: the combiner has no power constraint.
inline HybridCombiner sparse_combiner_omp(const SignalModel &m, const arma::cx_mat &dictionary, arma::uword n_rf,
                                          const OmpOptions &opts = {})
{
    m.validate();
    if (dictionary.n_rows != m.h.n_rows)
        throw std::invalid_argument("sparse_combiner_omp: dictionary row count must equal Nr");
    if (n_rf < 1)
        throw std::invalid_argument("sparse_combiner_omp: need n_rf >= 1");
    if (opts.forbid_reselection && n_rf > dictionary.n_cols)
        throw std::invalid_argument("sparse_combiner_omp: n_rf exceeds dictionary size with reselection forbidden");

    const arma::cx_mat w_mmse = mmse_combiner(m);
    const arma::cx_mat eyy = rx_covariance(m);

    HybridCombiner out;
    out.w_rf.set_size(dictionary.n_rows, 0);
    out.weighted_residual_history.set_size(n_rf);
    std::vector<bool> used(dictionary.n_cols, false);

    arma::cx_mat w_res = w_mmse;
    for (arma::uword i = 0; i < n_rf; ++i)
    {
        const arma::cx_mat psi = dictionary.t() * eyy * w_res;
        const arma::vec score = arma::sum(arma::square(arma::abs(psi)), 1);
        const arma::uword k = detail::argmax_column(score, used, opts.forbid_reselection);
        if (used[k])
        {
            ++out.duplicate_selections;
            ++diag::omp_duplicate_selections;
        }
        used[k] = true;
        out.selected.push_back(k);
        out.w_rf = arma::join_rows(out.w_rf, dictionary.col(k));

        const arma::cx_mat gram = out.w_rf.t() * eyy * out.w_rf;
        const arma::cx_mat rhs = out.w_rf.t() * eyy * w_mmse;
        out.w_bb = ls_solve_pinv(gram, rhs, opts.pinv_rtol);

        arma::cx_mat res = w_mmse - out.w_rf * out.w_bb;
        out.weighted_residual_history(i) = std::sqrt(std::max(0.0, std::real(arma::trace(res.t() * eyy * res))));
        const double rn = arma::norm(res, "fro");
        w_res = rn > 0.0 ? arma::cx_mat(res / rn) : arma::cx_mat(res.n_rows, res.n_cols, arma::fill::zeros);
    }
    return out;
}

// ---- Combined link design ---------------------------------------------------------

struct LinkOptions
{
    arma::uword n_rf_tx = 1;
    arma::uword n_rf_rx = 1;
    arma::uword ns = 1;        // requested streams (rank cap when waterfilling)
    bool waterfill = false;    // waterfill the unconstrained target's power
    OmpOptions omp{};
    const arma::cx_mat *tx_dictionary = nullptr; // default: the channel's ray dictionary
    const arma::cx_mat *rx_dictionary = nullptr;
    const UnconstrainedPrecoder *opt_cache = nullptr; // precomputed SVD of h (>= ns columns)
};

struct LinkDesign
{
    arma::uword ns = 0;           // designed stream count (<= requested when waterfilling)
    arma::cx_mat f_target;        // unconstrained target the precoder approximates
    HybridPrecoder precoder;
    HybridCombiner combiner;
};

// Designs the hybrid precoder/combiner pair for one channel realization.
// Whichever side has fewer RF chains is designed first (precoder first on
// ties): the precoder via matching pursuit on the unconstrained target, then
// the combiner against the resulting transmitted signal. With more transmit
// than receive chains the combiner is designed first assuming the
// unconstrained precoder, and the precoder then targets the dominant right
// singular vectors of the effective channel W^H H seen through it.
inline LinkDesign design_link(const ChannelRealization &real, double snr, const LinkOptions &opts)
{
    const arma::uword nt = real.h.n_cols, nr = real.h.n_rows;
    if (opts.ns < 1 || opts.ns > std::min(opts.n_rf_tx, opts.n_rf_rx))
        throw std::invalid_argument("design_link: streams must satisfy ns <= min(n_rf_tx, n_rf_rx)");
    if (opts.n_rf_tx > nt || opts.n_rf_rx > nr)
        throw std::invalid_argument("design_link: RF chain counts cannot exceed the antenna counts");

    const arma::cx_mat at = opts.tx_dictionary ? *opts.tx_dictionary : response_dictionary(real, LinkSide::tx);
    const arma::cx_mat ar = opts.rx_dictionary ? *opts.rx_dictionary : response_dictionary(real, LinkSide::rx);

    LinkDesign out;
    const UnconstrainedPrecoder opt =
        opts.opt_cache && opts.opt_cache->f_opt.n_cols >= opts.ns
            ? UnconstrainedPrecoder{opts.opt_cache->f_opt.cols(0, opts.ns - 1), opts.opt_cache->singular_values}
            : optimal_precoder(real.h, opts.ns);
    if (opts.waterfill)
    {
        const Waterfill wf = waterfilling(opt.singular_values, snr, opts.ns);
        out.ns = wf.ns;
        out.f_target = loaded_target(opt.f_opt.cols(0, wf.ns - 1), wf);
    }
    else
    {
        out.ns = opts.ns;
        out.f_target = opt.f_opt;
    }

    if (opts.n_rf_tx <= opts.n_rf_rx)
    {
        out.precoder = sparse_precoder_omp(out.f_target, at, opts.n_rf_tx, opts.omp);
        const SignalModel m{real.h, out.precoder.combined(), snr, out.ns};
        out.combiner = sparse_combiner_omp(m, ar, opts.n_rf_rx, opts.omp);
    }
    else
    {
        const SignalModel m{real.h, out.f_target, snr, out.ns};
        out.combiner = sparse_combiner_omp(m, ar, opts.n_rf_rx, opts.omp);
        const arma::cx_mat h_eff = out.combiner.combined().t() * real.h;
        const UnconstrainedPrecoder opt_eff = optimal_precoder(h_eff, out.ns);
        arma::cx_mat target_eff = opt_eff.f_opt;
        if (opts.waterfill)
            target_eff = loaded_target(target_eff, waterfilling(opt_eff.singular_values, snr, out.ns));
        out.precoder = sparse_precoder_omp(target_eff, at, opts.n_rf_tx, opts.omp);
    }
    return out;
}

} // namespace hybeam
