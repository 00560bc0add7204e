// SPDX-License-Identifier: Apache-2.0
//
// hybridfb: reduced-feedback hybrid precoding for wideband mmWave MIMO-OFDM
// Copyright (C) 2026 The hybridfb authors
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

#include "hybridfb/assignment.hpp"
#include "hybridfb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace hfb
{
    std::string_view to_string(Method m)
    {
        switch (m)
        {
        case Method::hierarchical:
            return "hierarchical";
        case Method::gaussian:
            return "gaussian";
        case Method::geodesic:
            return "geodesic";
        case Method::cluster_simple:
            return "cluster_simple";
        case Method::cluster_snr:
            return "cluster_snr";
        case Method::per_subcarrier_exhaustive:
            return "per_subcarrier_exhaustive";
        }
        return "unknown";
    }

    std::vector<Method> all_methods()
    {
        return {Method::hierarchical, Method::gaussian, Method::geodesic,
                Method::cluster_simple, Method::cluster_snr, Method::per_subcarrier_exhaustive};
    }

    Method method_from_string(std::string_view name)
    {
        for (auto m : all_methods())
            if (to_string(m) == name)
                return m;
        throw InvalidRequest("unknown method '" + std::string(name) + "'");
    }

    arma::uword ceil_log2(arma::uword x)
    {
        arma::uword bits = 0;
        while ((arma::uword(1) << bits) < x)
            ++bits;
        return bits;
    }

    std::vector<arma::uword> pilot_indices(arma::uword num_subcarriers, arma::uword spacing)
    {
        if (num_subcarriers == 0 || spacing == 0 || num_subcarriers % spacing != 0)
            throw InvalidRequest("pilot_indices: pilot spacing must divide the number of subcarriers");
        std::vector<arma::uword> p;
        for (arma::uword q = 0; q < num_subcarriers / spacing; ++q)
            p.push_back(q * spacing + 1);
        // Closing pilot: the last interval ends at K rather than at the nonexistent K + 1.
        if (p.back() != num_subcarriers)
            p.push_back(num_subcarriers);
        return p;
    }

    void align_streams(const DigitalPrecoder &previous, DigitalPrecoder &current)
    {
        const arma::uword ns = current.indices.size();
        if (ns < 2 || previous.indices.size() != ns)
            return;
        // |<v_prev^s, v_cur^t>|^2, shared codewords score 1
        const arma::mat corr = arma::square(arma::abs(previous.V.t() * current.V));
        std::vector<arma::uword> perm(ns), best;
        std::iota(perm.begin(), perm.end(), arma::uword(0));
        double best_score = -1.0;
        do
        {
            double score = 0.0;
            for (arma::uword t = 0; t < ns; ++t)
                score += corr(t, perm[t]) + (previous.indices[t] == current.indices[perm[t]] ? 1.0 : 0.0);
            if (score > best_score + 1e-12)
            {
                best_score = score;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        DigitalPrecoder out = current;
        for (arma::uword t = 0; t < ns; ++t)
        {
            out.indices[t] = current.indices[best[t]];
            out.V.col(t) = current.V.col(best[t]);
        }
        current = std::move(out);
    }

    PilotGrid assign_pilots(const arma::cx_cube &h_eff, const Codebook &codebook, arma::uword spacing,
                            arma::uword num_streams)
    {
        PilotGrid g;
        g.num_subcarriers = h_eff.n_slices;
        g.spacing = spacing;
        g.bits = codebook.bits;
        g.pilots = pilot_indices(h_eff.n_slices, spacing);
        for (auto p : g.pilots)
        {
            DigitalPrecoder v = select_codewords(h_eff.slice(p - 1), codebook, num_streams);
            if (!g.precoders.empty())
                align_streams(g.precoders.back(), v);
            g.eval_count += v.evaluations;
            g.precoders.push_back(std::move(v));
        }
        return g;
    }

    namespace
    {
        PrecoderAssignment blank(Method method, arma::uword dim, arma::uword streams, arma::uword K)
        {
            PrecoderAssignment a;
            a.method = method;
            a.F.zeros(dim, streams, K);
            a.codeword.set_size(K, streams);
            a.codeword.fill(-1);
            return a;
        }

        void place(PrecoderAssignment &a, arma::uword k, const DigitalPrecoder &v)
        {
            a.F.slice(k - 1) = v.V;
            for (arma::uword t = 0; t < v.indices.size(); ++t)
                a.codeword(k - 1, t) = static_cast<arma::sword>(v.indices[t]);
        }

        void set_column(PrecoderAssignment &a, arma::uword k, arma::uword t, const arma::cx_vec &col,
                        arma::sword index)
        {
            a.F.slice(k - 1).col(t) = col;
            a.codeword(k - 1, t) = index;
        }

        // Pilot subcarriers carry their own precoder, pilot-interval per-stream feedback is b bits per codeword.
        PrecoderAssignment from_grid(Method method, const PilotGrid &grid)
        {
            if (grid.pilots.empty())
                throw InvalidRequest("pilot grid is empty");
            const arma::uword dim = grid.precoders.front().V.n_rows;
            PrecoderAssignment a = blank(method, dim, grid.num_streams(), grid.num_subcarriers);
            for (arma::uword i = 0; i < grid.pilots.size(); ++i)
                place(a, grid.pilots[i], grid.precoders[i]);
            a.eval_count = grid.eval_count;
            a.feedback_bits_per_stream = std::uint64_t(grid.pilots.size()) * grid.num_streams() * grid.bits;
            a.feedback_bits_paper = std::uint64_t(grid.num_subcarriers / grid.spacing) * grid.bits;
            return a;
        }

        void count_collisions(PrecoderAssignment &a)
        {
            a.collisions = 0;
            for (arma::uword k = 0; k < a.codeword.n_rows; ++k)
            {
                bool hit = false;
                for (arma::uword s = 0; s < a.codeword.n_cols && !hit; ++s)
                    for (arma::uword t = s + 1; t < a.codeword.n_cols && !hit; ++t)
                        hit = a.codeword(k, s) >= 0 && a.codeword(k, s) == a.codeword(k, t);
                a.collisions += hit ? 1 : 0;
            }
        }

        double gain(const arma::cx_cube &h, arma::uword k, const arma::cx_vec &v)
        {
            return arma::norm(h.slice(k - 1) * v);
        }

        // Column-wise interior fill shared by the pilot-based baselines. `blend(u, v, w)` builds the
        // column at fraction w of the way from the left pilot to the right one.
        template <typename Blend>
        PrecoderAssignment interpolate(Method method, const PilotGrid &grid, Blend blend)
        {
            PrecoderAssignment a = from_grid(method, grid);
            for (arma::uword q = 0; q < grid.num_intervals(); ++q)
            {
                const arma::uword lp = grid.pilots[q], rp = grid.pilots[q + 1];
                const auto &left = grid.precoders[q], &right = grid.precoders[q + 1];
                for (arma::uword t = 0; t < a.num_streams(); ++t)
                {
                    const arma::cx_vec u = left.V.col(t), v = right.V.col(t);
                    const bool same = left.indices[t] == right.indices[t];
                    for (arma::uword k = lp + 1; k < rp; ++k)
                    {
                        if (same)
                            set_column(a, k, t, u, static_cast<arma::sword>(left.indices[t]));
                        else
                            set_column(a, k, t, blend(u, v, double(k - lp) / double(rp - lp)), -1);
                    }
                }
            }
            count_collisions(a);
            return a;
        }
    }

    std::string_view to_string(SwitchRule r)
    {
        return r == SwitchRule::joint ? "joint" : "per_stream";
    }

    SwitchRule switch_rule_from_string(std::string_view name)
    {
        if (name == "joint")
            return SwitchRule::joint;
        if (name == "per_stream")
            return SwitchRule::per_stream;
        throw InvalidRequest("switch_rule must be 'joint' or 'per_stream', got '" + std::string(name) + "'");
    }

    PrecoderAssignment hierarchical_interpolate(const arma::cx_cube &h_eff, const PilotGrid &grid, SwitchRule rule)
    {
        if (h_eff.n_slices != grid.num_subcarriers)
            throw InvalidRequest("hierarchical_interpolate: channel and pilot grid disagree on K");
        PrecoderAssignment a = from_grid(Method::hierarchical, grid);
        const arma::uword switch_bits = ceil_log2(grid.spacing);
        a.feedback_bits_paper = std::uint64_t(grid.num_subcarriers / grid.spacing + switch_bits) * grid.bits;

        // Bisection over (lp, rp]; returns the first subcarrier that takes the right codeword
        auto search = [&](arma::uword lp, arma::uword rp, arma::uword &probes, auto left_wins)
        {
            arma::uword lo = lp, hi = rp;
            probes = 0;
            while (hi - lo > 1)
            {
                const arma::uword mid = (lo + hi) / 2;
                a.eval_count += 2;
                ++probes;
                if (left_wins(mid))
                    lo = mid;
                else
                    hi = mid;
            }
            return hi;
        };

        for (arma::uword q = 0; q < grid.num_intervals(); ++q)
        {
            const arma::uword lp = grid.pilots[q], rp = grid.pilots[q + 1];
            const auto &left = grid.precoders[q], &right = grid.precoders[q + 1];

            arma::uword shared_switch = rp, shared_probes = 0;
            if (rule == SwitchRule::joint && left.indices != right.indices)
                shared_switch = search(lp, rp, shared_probes, [&](arma::uword k)
                                       { return arma::norm(h_eff.slice(k - 1) * left.V, "fro") >
                                                arma::norm(h_eff.slice(k - 1) * right.V, "fro"); });

            for (arma::uword t = 0; t < a.num_streams(); ++t)
            {
                const arma::cx_vec u = left.V.col(t), v = right.V.col(t);
                const auto iu = static_cast<arma::sword>(left.indices[t]);
                const auto iv = static_cast<arma::sword>(right.indices[t]);
                if (iu == iv)
                {
                    for (arma::uword k = lp + 1; k < rp; ++k)
                        set_column(a, k, t, u, iu);
                    a.feedback_bits_per_stream += 1;
                    continue;
                }

                SwitchSearch s{q, t, lp, rp, shared_switch, shared_probes};
                if (rule == SwitchRule::per_stream)
                    s.switch_point = search(lp, rp, s.probes, [&](arma::uword k)
                                            { return gain(h_eff, k, u) > gain(h_eff, k, v); });
                for (arma::uword k = lp + 1; k < s.switch_point; ++k)
                    set_column(a, k, t, u, iu);
                for (arma::uword k = s.switch_point; k < rp; ++k)
                    set_column(a, k, t, v, iv);
                a.feedback_bits_per_stream += switch_bits;
                a.searches.push_back(s);
            }
        }
        count_collisions(a);
        return a;
    }

    PrecoderAssignment interpolate_gaussian(const PilotGrid &grid)
    {
        return interpolate(Method::gaussian, grid,
                           [](const arma::cx_vec &u, const arma::cx_vec &v, double w) -> arma::cx_vec
                           {
                               arma::cx_vec c = (1.0 - w) * u + w * v;
                               const double n = arma::norm(c);
                               // Antipodal endpoints cancel at the midpoint; keep the left column there.
                               if (n < 1e-12)
                                   return u;
                               return c / n;
                           });
    }

    PrecoderAssignment interpolate_geodesic(const PilotGrid &grid)
    {
        return interpolate(Method::geodesic, grid,
                           [](const arma::cx_vec &u, const arma::cx_vec &v, double w) -> arma::cx_vec
                           {
                               const std::complex<double> ip = arma::cdot(u, v);
                               const double mag = std::abs(ip);
                               const arma::cx_vec aligned = mag > 0.0 ? arma::cx_vec(v * (std::conj(ip) / mag)) : v;
                               const double angle = std::acos(std::min(mag, 1.0));
                               arma::cx_vec e(u.n_elem, arma::fill::zeros);
                               if (angle > 1e-8)
                               {
                                   e = aligned - mag * u;
                                   e /= arma::norm(e);
                               }
                               return std::cos(w * angle) * u + std::sin(w * angle) * e;
                           });
    }

    PrecoderAssignment cluster_simple(const PilotGrid &grid)
    {
        PrecoderAssignment a = from_grid(Method::cluster_simple, grid);
        for (arma::uword q = 0; q < grid.num_intervals(); ++q)
            for (arma::uword k = grid.pilots[q] + 1; k < grid.pilots[q + 1]; ++k)
                place(a, k, grid.precoders[q]);
        count_collisions(a);
        return a;
    }

    PrecoderAssignment cluster_snr_max(const arma::cx_cube &h_eff, const Codebook &codebook, arma::uword spacing,
                                       arma::uword num_streams)
    {
        const arma::uword K = h_eff.n_slices;
        if (spacing == 0 || K % spacing != 0)
            throw InvalidRequest("cluster_snr_max: cluster size must divide the number of subcarriers");
        PrecoderAssignment a = blank(Method::cluster_snr, codebook.dim(), num_streams, K);
        for (arma::uword first = 1; first <= K; first += spacing)
        {
            std::vector<arma::cx_mat> group;
            for (arma::uword k = first; k < first + spacing; ++k)
                group.push_back(h_eff.slice(k - 1));
            const DigitalPrecoder v = select_codewords_joint(group, codebook, num_streams);
            a.eval_count += v.evaluations;
            for (arma::uword k = first; k < first + spacing; ++k)
                place(a, k, v);
        }
        a.feedback_bits_per_stream = std::uint64_t(K / spacing) * num_streams * codebook.bits;
        a.feedback_bits_paper = std::uint64_t(K / spacing) * codebook.bits;
        count_collisions(a);
        return a;
    }

    PrecoderAssignment per_subcarrier_exhaustive(const arma::cx_cube &h_eff, const Codebook &codebook,
                                                 arma::uword num_streams)
    {
        const arma::uword K = h_eff.n_slices;
        PrecoderAssignment a = blank(Method::per_subcarrier_exhaustive, codebook.dim(), num_streams, K);
        for (arma::uword k = 1; k <= K; ++k)
        {
            const DigitalPrecoder v = select_codewords(h_eff.slice(k - 1), codebook, num_streams);
            a.eval_count += v.evaluations;
            place(a, k, v);
        }
        a.feedback_bits_per_stream = std::uint64_t(K) * num_streams * codebook.bits;
        a.feedback_bits_paper = std::uint64_t(K) * codebook.bits;
        count_collisions(a);
        return a;
    }

    PrecoderAssignment assign(Method method, const arma::cx_cube &h_eff, const Codebook &codebook, const PilotGrid &grid,
                              SwitchRule rule)
    {
        switch (method)
        {
        case Method::hierarchical:
            return hierarchical_interpolate(h_eff, grid, rule);
        case Method::gaussian:
            return interpolate_gaussian(grid);
        case Method::geodesic:
            return interpolate_geodesic(grid);
        case Method::cluster_simple:
            return cluster_simple(grid);
        case Method::cluster_snr:
            return cluster_snr_max(h_eff, codebook, grid.spacing, grid.num_streams());
        case Method::per_subcarrier_exhaustive:
            return per_subcarrier_exhaustive(h_eff, codebook, grid.num_streams());
        }
        throw InvalidRequest("assign: unknown method");
    }

    void write_assignment_csv(std::ostream &out, const PrecoderAssignment &a)
    {
        out << "k,stream,codeword_index,method\n";
        const auto tag = to_string(a.method);
        for (arma::uword k = 0; k < a.codeword.n_rows; ++k)
            for (arma::uword t = 0; t < a.codeword.n_cols; ++t)
                out << (k + 1) << "," << (t + 1) << "," << a.codeword(k, t) << "," << tag << "\n";
    }
}
