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
// Transmit-side design: unconstrained (SVD) precoding, waterfilling power
// allocation, hybrid RF/baseband precoding via orthogonal matching pursuit
// over a steering-vector dictionary, rate formulas, a beam-steering
// baseline, and beam patterns.
//
// Conventions: Ns data streams with symbol covariance I/Ns, total transmit
// power constraint ||F||_F^2 = Ns (so unit radiated power), noise variance 1,
// snr = transmit power over noise power.

#pragma once

#include "channel.hpp"

namespace hybeam {

// ---- Unconstrained precoding -------------------------------------------------

struct UnconstrainedPrecoder
{
    arma::cx_mat f_opt;       // Nt x Ns, the Ns dominant right singular vectors
    arma::vec singular_values; // all min(Nr, Nt) singular values, descending
};

// Ns dominant right singular vectors of h, with a deterministic phase: each
// column is rotated so its largest-modulus entry (lowest index on ties) is
// real and positive.
inline UnconstrainedPrecoder optimal_precoder(const arma::cx_mat &h, arma::uword ns)
{
    if (h.n_rows < 1 || h.n_cols < 1)
        throw std::invalid_argument("optimal_precoder: empty channel matrix");
    if (ns < 1 || ns > std::min(h.n_rows, h.n_cols))
        throw std::invalid_argument("optimal_precoder: need 1 <= ns <= min(Nr, Nt)");

    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd_econ(u, s, v, h))
        throw std::runtime_error("optimal_precoder: SVD failed to converge");
    if (!(s(ns - 1) > 1e-10 * s(0)))
        throw std::invalid_argument("optimal_precoder: ns exceeds the numerical rank of the channel");

    arma::cx_mat f = v.cols(0, ns - 1);
    for (arma::uword c = 0; c < f.n_cols; ++c)
    {
        arma::uword imax = 0;
        double amax = std::abs(f(0, c));
        for (arma::uword i = 1; i < f.n_rows; ++i)
            if (std::abs(f(i, c)) > amax)
            {
                amax = std::abs(f(i, c));
                imax = i;
            }
        f.col(c) *= std::polar(1.0, -std::arg(f(imax, c)));
    }
    return {std::move(f), std::move(s)};
}

// ---- Waterfilling --------------------------------------------------------------

struct Waterfill
{
    arma::vec gamma_sq; // per-stream power gains, sum = ns
    arma::uword ns = 0; // number of strictly positive allocations
};

// Waterfilling over eigenchannels sv(i) (descending singular values): the
// number of candidate streams is capped at ns_max, the i-th stream sees
// effective inverse gain 1/(snr*sv_i^2), and the returned gamma_sq are
// scaled so that sum(gamma_sq) = ns, matching ||F_opt * Gamma||_F^2 = Ns.
inline Waterfill waterfilling(const arma::vec &sv, double snr, arma::uword ns_max)
{
    if (sv.is_empty())
        throw std::invalid_argument("waterfilling: empty singular value list");
    if (!(snr > 0.0))
        throw std::invalid_argument("waterfilling: snr must be > 0");
    if (ns_max < 1)
        throw std::invalid_argument("waterfilling: ns_max must be >= 1");
    if (!sv.is_sorted("descend"))
        throw std::invalid_argument("waterfilling: singular values must be sorted descending");
    if (!(sv(0) > 0.0))
        throw std::invalid_argument("waterfilling: all singular values are zero");

    arma::uword kmax = std::min<arma::uword>(ns_max, sv.n_elem);
    while (kmax > 1 && !(sv(kmax - 1) > 1e-14 * sv(0)))
        --kmax;

    // inverse gains, ascending since sv is descending
    arma::vec n(kmax);
    for (arma::uword i = 0; i < kmax; ++i)
        n(i) = 1.0 / (snr * sv(i) * sv(i));

    // largest k whose water level clears the weakest active channel
    arma::uword k = kmax;
    double mu = 0.0;
    for (; k >= 1; --k)
    {
        mu = (1.0 + arma::accu(n.head(k))) / double(k);
        if (mu > n(k - 1))
            break;
    }

    Waterfill wf;
    wf.ns = k;
    wf.gamma_sq = double(k) * (mu - n.head(k));
    return wf;
}

// F_opt columns scaled by the waterfilling amplitudes; streams beyond the
// active set keep zero columns so dimensions stay aligned.
inline arma::cx_mat loaded_target(const arma::cx_mat &v, const Waterfill &wf)
{
    arma::cx_mat f(v.n_rows, v.n_cols, arma::fill::zeros);
    for (arma::uword i = 0; i < v.n_cols && i < wf.gamma_sq.n_elem; ++i)
        f.col(i) = v.col(i) * std::sqrt(wf.gamma_sq(i));
    return f;
}

// ---- Hybrid precoding via orthogonal matching pursuit --------------------------

struct OmpOptions
{
    bool unitary_bb = false;        // replace the LS baseband solve by the
                                    // orthogonal-Procrustes (unitary) solution
    bool forbid_reselection = false; // disallow picking a dictionary column twice
    double pinv_rtol = 1e-10;       // relative cutoff for rank-deficient solves
};

struct HybridPrecoder
{
    arma::cx_mat f_rf; // Nt x n_rf, columns drawn from the dictionary
    arma::cx_mat f_bb; // n_rf x Ns
    std::vector<arma::uword> selected;   // dictionary column per iteration
    arma::vec residual_history;          // ||F_target - F_rf F_bb||_F per iteration
    arma::uword duplicate_selections = 0;

    arma::cx_mat combined() const { return f_rf * f_bb; }
};

namespace detail {

// argmax of `score` with ties broken toward the lowest index; columns marked
// used are skipped when `forbid` is set.
inline arma::uword argmax_column(const arma::vec &score, const std::vector<bool> &used, bool forbid)
{
    arma::uword best = score.n_elem;
    double best_score = -1.0;
    for (arma::uword j = 0; j < score.n_elem; ++j)
    {
        if (forbid && used[j])
            continue;
        if (score(j) > best_score)
        {
            best_score = score(j);
            best = j;
        }
    }
    if (best == score.n_elem)
        throw std::logic_error("matching pursuit: no selectable dictionary column left");
    return best;
}

} // namespace detail

// Greedy sparse approximation of f_target by n_rf dictionary columns:
//
//   repeat n_rf times:
//     k    = argmax_l diag(Psi Psi^H),  Psi = A^H F_res   (lowest index on ties)
//     F_rf = [F_rf | a_k]
//     F_bb = argmin ||F_target - F_rf F_bb||_F            (LS; or Procrustes
//                                                          when unitary_bb)
//     F_res = (F_target - F_rf F_bb) / ||F_target - F_rf F_bb||_F
//   finally rescale F_bb so that ||F_rf F_bb||_F^2 = Ns.
//
// Columns may be selected more than once (counted in duplicate_selections);
// the SVD-based LS solve stays well defined in that case. A residual that
// underflows to zero mid-loop is left unnormalized (zero), which makes the
// remaining selections fall back to column 0 harmlessly.
inline HybridPrecoder sparse_precoder_omp(const arma::cx_mat &f_target, const arma::cx_mat &dictionary,
                                          arma::uword n_rf, const OmpOptions &opts = {})
{
    if (f_target.n_rows != dictionary.n_rows)
        throw std::invalid_argument("sparse_precoder_omp: target and dictionary row counts differ");
    if (f_target.n_cols < 1 || dictionary.n_cols < 1)
        throw std::invalid_argument("sparse_precoder_omp: target and dictionary must be non-empty");
    if (n_rf < 1)
        throw std::invalid_argument("sparse_precoder_omp: need n_rf >= 1");
    if (opts.forbid_reselection && n_rf > dictionary.n_cols)
        throw std::invalid_argument("sparse_precoder_omp: n_rf exceeds dictionary size with reselection forbidden");
    if (!(arma::norm(f_target, "fro") > 0.0))
        throw std::invalid_argument("sparse_precoder_omp: target precoder is zero");

    const arma::uword ns = f_target.n_cols;
    HybridPrecoder out;
    out.f_rf.set_size(dictionary.n_rows, 0);
    out.residual_history.set_size(n_rf);
    std::vector<bool> used(dictionary.n_cols, false);

    arma::cx_mat f_res = f_target;
    for (arma::uword i = 0; i < n_rf; ++i)
    {
        const arma::cx_mat psi = dictionary.t() * f_res;
        const arma::vec score = arma::sum(arma::square(arma::abs(psi)), 1);
        const arma::uword k = detail::argmax_column(score, used, opts.forbid_reselection);
        if (used[k])
        {
            ++out.duplicate_selections;
            ++diag::omp_duplicate_selections;
        }
        used[k] = true;
        out.selected.push_back(k);
        out.f_rf = arma::join_rows(out.f_rf, dictionary.col(k));

        if (opts.unitary_bb)
        {
            // orthogonal Procrustes: F_bb = U V^H from F_rf^H F_target = U S V^H
            arma::cx_mat u, v;
            arma::vec s;
            if (!arma::svd_econ(u, s, v, arma::cx_mat(out.f_rf.t() * f_target)))
                throw std::runtime_error("sparse_precoder_omp: Procrustes SVD failed");
            out.f_bb = u * v.t();
        }
        else
        {
            out.f_bb = ls_solve_pinv(out.f_rf, f_target, opts.pinv_rtol);
        }

        arma::cx_mat res = f_target - out.f_rf * out.f_bb;
        const double rn = arma::norm(res, "fro");
        out.residual_history(i) = rn;
        f_res = rn > 0.0 ? arma::cx_mat(res / rn) : arma::cx_mat(res.n_rows, res.n_cols, arma::fill::zeros);
    }

    const double pn = arma::norm(out.f_rf * out.f_bb, "fro");
    if (!(pn > 0.0))
        throw std::runtime_error("sparse_precoder_omp: designed precoder has zero power "
                                 "(target orthogonal to the selected dictionary columns)");
    out.f_bb *= std::sqrt(double(ns)) / pn;
    return out;
}

// ---- Rate formulas -------------------------------------------------------------

// Mutual information with Gaussian signaling through precoder f (combined),
// optimal unconstrained receiver:  log2 det(I + snr/ns * (HF)^H (HF)).
inline double mutual_information(const arma::cx_mat &h, const arma::cx_mat &f, double snr, arma::uword ns)
{
    if (h.n_cols != f.n_rows)
        throw std::invalid_argument("mutual_information: channel/precoder dimension mismatch");
    if (ns < 1)
        throw std::invalid_argument("mutual_information: need ns >= 1");
    if (!(snr > 0.0))
        throw std::invalid_argument("mutual_information: snr must be > 0");
    const arma::cx_mat hf = h * f;
    arma::cx_mat g = hf.t() * hf;
    g = 0.5 * (g + g.t());
    return log2det_hpd(arma::eye<arma::cx_mat>(g.n_rows, g.n_cols) + (snr / double(ns)) * g);
}

inline double mutual_information(const arma::cx_mat &h, const arma::cx_mat &f_rf, const arma::cx_mat &f_bb,
                                 double snr, arma::uword ns)
{
    return mutual_information(h, arma::cx_mat(f_rf * f_bb), snr, ns);
}

// Near-optimal approximation of the mutual information of a hybrid precoder:
// the unconstrained optimum minus the squared-chordal-distance penalty
// Ns - ||V1^H F_rf F_bb||_F^2 between the designed and optimal subspaces.
inline double mutual_information_approx(const arma::cx_mat &h, const arma::cx_mat &f_rf, const arma::cx_mat &f_bb,
                                        double snr, arma::uword ns)
{
    const UnconstrainedPrecoder opt = optimal_precoder(h, ns);
    double exact_opt = 0.0;
    for (arma::uword i = 0; i < ns; ++i)
        exact_opt += std::log2(1.0 + (snr / double(ns)) * opt.singular_values(i) * opt.singular_values(i));
    const double overlap = std::pow(arma::norm(arma::cx_mat(opt.f_opt.t() * f_rf * f_bb), "fro"), 2);
    return exact_opt - (double(ns) - overlap);
}

namespace detail {

// Shared spectral-efficiency core: rate from the receive Gram Rn = W^H W and
// the effective signal matrix A = W^H H F (noise variance 1):
//   rate = log2 det(Rn + snr/ns * A A^H) - log2 det(Rn).
// Falls back to a pseudo-inverse of Rn when it is ill conditioned.
inline double rate_from_grams(arma::cx_mat rn, const arma::cx_mat &a, double snr, arma::uword ns)
{
    rn = 0.5 * (rn + rn.t());
    const double c = arma::cond(rn);
    if (std::isfinite(c) && c < 1e12)
    {
        arma::cx_mat s = rn + (snr / double(ns)) * (a * a.t());
        s = 0.5 * (s + s.t());
        return log2det_hpd(s) - log2det_hpd(rn);
    }
    ++diag::noise_pinv_fallbacks;
    const arma::cx_mat p = arma::pinv(rn);
    const arma::cx_mat m =
        arma::eye<arma::cx_mat>(a.n_rows, a.n_rows) + (snr / double(ns)) * (p * (a * a.t()));
    return std::log2(std::abs(arma::det(m)));
}

} // namespace detail

// Spectral efficiency of the full link with linear combiner w (combined,
// Nr x Ns) and precoder f (combined, Nt x Ns), Gaussian signaling, colored
// post-combining noise covariance W^H W (noise variance 1).
inline double spectral_efficiency(const arma::cx_mat &h, const arma::cx_mat &f, const arma::cx_mat &w, double snr,
                                  arma::uword ns)
{
    if (w.n_rows != h.n_rows || f.n_rows != h.n_cols || w.n_cols != f.n_cols)
        throw std::invalid_argument("spectral_efficiency: dimension mismatch");
    if (ns < 1 || !(snr > 0.0))
        throw std::invalid_argument("spectral_efficiency: need ns >= 1 and snr > 0");
    if (!(arma::norm(w, "fro") > 0.0))
    {
        ++diag::zero_combiner_rates;
        return 0.0;
    }
    return detail::rate_from_grams(w.t() * w, w.t() * h * f, snr, ns);
}

// ---- Beam steering baseline -----------------------------------------------------

struct BeamSteeringOptions
{
    bool waterfill = false;          // per-stream waterfilling power allocation
    arma::uword max_subsets = 100000; // cap on the exhaustive subset search
};

struct BeamSteering
{
    arma::cx_mat f;                  // Nt x ns, steering columns incl. power
    arma::cx_mat w;                  // Nr x ns, receive steering columns
    std::vector<arma::uword> rays;   // selected ray indices
    arma::vec gamma_sq;              // per-stream power gains, sum = ns
    double rate = 0.0;
};

namespace detail {

inline double subset_count(arma::uword n, arma::uword k)
{
    double c = 1.0;
    for (arma::uword i = 0; i < k; ++i)
        c *= double(n - i) / double(i + 1);
    return c;
}

// Waterfilling over per-stream scalar power gains g_i = |a_r^H H a_t|^2 (not
// necessarily sorted); zero-gain streams receive zero power.
inline arma::vec stream_waterfill(const arma::vec &gains, double snr)
{
    const arma::uword ns = gains.n_elem;
    const arma::uvec order = arma::sort_index(gains, "descend");
    arma::uword kmax = 0;
    while (kmax < ns && gains(order(kmax)) > 1e-14 * gains(order(0)) && gains(order(0)) > 0.0)
        ++kmax;
    arma::vec out(ns, arma::fill::zeros);
    if (kmax == 0)
        return out;
    arma::vec n(kmax);
    for (arma::uword i = 0; i < kmax; ++i)
        n(i) = 1.0 / (snr * gains(order(i)));
    arma::uword k = kmax;
    double mu = 0.0;
    for (; k >= 1; --k)
    {
        mu = (1.0 + arma::accu(n.head(k))) / double(k);
        if (mu > n(k - 1))
            break;
    }
    for (arma::uword i = 0; i < k; ++i)
        out(order(i)) = double(ns) * (mu - n(i));
    return out;
}

} // namespace detail

// Exhaustive beam-steering baseline: streams are steered onto physical rays
// of the channel, one transmit/receive steering-vector pair per stream, no
// baseband processing beyond (optional) per-stream waterfilling power
// allocation. All size-ns ray subsets are evaluated through the spectral
// efficiency formula and the best one is returned (lexicographically first
// on ties). n_rf only bounds ns (one chain per stream, extra chains idle).
inline BeamSteering beam_steering_baseline(const ChannelRealization &real, arma::uword ns, double snr,
                                           arma::uword n_rf, const BeamSteeringOptions &opts = {})
{
    const arma::uword k = real.rays.size();
    if (ns < 1 || ns > n_rf)
        throw std::invalid_argument("beam_steering_baseline: need 1 <= ns <= n_rf");
    if (ns > k)
        throw std::invalid_argument("beam_steering_baseline: ns exceeds the number of rays");
    if (!(snr > 0.0))
        throw std::invalid_argument("beam_steering_baseline: snr must be > 0");
    if (detail::subset_count(k, ns) > double(opts.max_subsets))
        throw std::invalid_argument("beam_steering_baseline: subset count exceeds the cap; "
                                    "reduce ns or the number of rays (or raise max_subsets)");

    const arma::cx_mat at = response_dictionary(real, LinkSide::tx);
    const arma::cx_mat ar = response_dictionary(real, LinkSide::rx);
    const arma::cx_mat g = ar.t() * real.h * at; // g(i,j) = a_r(i)^H H a_t(j)
    const arma::cx_mat rr = ar.t() * ar;

    std::vector<arma::uword> idx(ns), best_idx;
    for (arma::uword i = 0; i < ns; ++i)
        idx[i] = i;
    arma::vec best_gamma;
    double best_rate = -1.0;

    while (true)
    {
        const arma::uvec s(idx);
        arma::vec gains(ns);
        for (arma::uword i = 0; i < ns; ++i)
            gains(i) = std::norm(g(idx[i], idx[i]));
        arma::vec gamma_sq =
            opts.waterfill ? detail::stream_waterfill(gains, snr) : arma::vec(ns, arma::fill::ones);

        arma::cx_mat a = g.submat(s, s);
        for (arma::uword i = 0; i < ns; ++i)
            a.col(i) *= std::sqrt(gamma_sq(i));
        const double rate = detail::rate_from_grams(rr.submat(s, s), a, snr, ns);
        if (rate > best_rate)
        {
            best_rate = rate;
            best_idx = idx;
            best_gamma = gamma_sq;
        }

        // next lexicographic combination
        arma::sword i = arma::sword(ns) - 1;
        while (i >= 0 && idx[i] == k - ns + arma::uword(i))
            --i;
        if (i < 0)
            break;
        ++idx[i];
        for (arma::uword j = arma::uword(i) + 1; j < ns; ++j)
            idx[j] = idx[j - 1] + 1;
    }

    BeamSteering out;
    out.rays = best_idx;
    out.gamma_sq = best_gamma;
    out.rate = best_rate;
    out.f.set_size(at.n_rows, ns);
    out.w.set_size(ar.n_rows, ns);
    for (arma::uword i = 0; i < ns; ++i)
    {
        out.f.col(i) = at.col(best_idx[i]) * std::sqrt(best_gamma(i));
        out.w.col(i) = ar.col(best_idx[i]);
    }
    return out;
}

// ---- Beam patterns ---------------------------------------------------------------

// Radiated power pattern of beamforming vector f over an (az, el) grid:
// gain(az, el) = N * |a(az, el)^H f|^2, so a steering vector aimed at the
// grid point yields N and an isotropy-averaged gain of ||f||^2.
inline arma::mat beam_pattern(const ArrayGeometry &geom, const arma::cx_vec &f, const arma::vec &az_rad,
                              const arma::vec &el_rad)
{
    if (f.n_elem != geom.size())
        throw std::invalid_argument("beam_pattern: beamformer length must match the array size");
    arma::mat gain(az_rad.n_elem, el_rad.n_elem);
    for (arma::uword j = 0; j < el_rad.n_elem; ++j)
        for (arma::uword i = 0; i < az_rad.n_elem; ++i)
        {
            const arma::cx_vec a = array_response(geom, az_rad(i), el_rad(j));
            gain(i, j) = double(geom.size()) * std::norm(arma::cdot(a, f));
        }
    return gain;
}

} // namespace hybeam
