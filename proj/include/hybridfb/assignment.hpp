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

#ifndef hybridfb_assignment_H
#define hybridfb_assignment_H

#include "hybridfb/codebook.hpp"

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hfb
{
    enum class Method
    {
        hierarchical,
        gaussian,
        geodesic,
        cluster_simple,
        cluster_snr,
        per_subcarrier_exhaustive
    };

    std::string_view to_string(Method m);
    Method method_from_string(std::string_view name); // throws InvalidRequest on unknown tags
    std::vector<Method> all_methods();

    // Pilot subcarriers (1-based) {qM + 1 : q = 0..Q-1} plus the closing pilot at K, and the
    // precoder chosen at each of them.
    struct PilotGrid
    {
        arma::uword num_subcarriers = 0;
        arma::uword spacing = 0;
        unsigned bits = 0;
        std::vector<arma::uword> pilots;
        std::vector<DigitalPrecoder> precoders;
        std::uint64_t eval_count = 0;

        arma::uword num_intervals() const { return pilots.empty() ? 0 : pilots.size() - 1; }
        arma::uword num_streams() const { return precoders.empty() ? 0 : precoders.front().V.n_cols; }
    };

    // One binary search over an (interval, stream) pair whose end codewords differ.
    struct SwitchSearch
    {
        arma::uword interval = 0;
        arma::uword stream = 0;
        arma::uword left = 0;  // left pilot subcarrier
        arma::uword right = 0; // right pilot subcarrier
        arma::uword switch_point = 0;
        arma::uword probes = 0;
    };

    struct PrecoderAssignment
    {
        Method method = Method::hierarchical;
        arma::cx_cube F;            // N_t_RF x N_s x K, slice k-1 = F[k]
        arma::Mat<arma::sword> codeword; // K x N_s, -1 where the column is not a codebook member
        std::uint64_t feedback_bits_per_stream = 0; // b bits per fed-back codeword and stream, plus switch points
        std::uint64_t feedback_bits_paper = 0;      // closed form, one b-bit index per fed-back position
        std::uint64_t eval_count = 0;
        arma::uword collisions = 0; // subcarriers where two streams carry the same codeword
        std::vector<SwitchSearch> searches;

        arma::uword num_subcarriers() const { return F.n_slices; }
        arma::uword num_streams() const { return F.n_cols; }
    };

    arma::uword ceil_log2(arma::uword x);

    std::vector<arma::uword> pilot_indices(arma::uword num_subcarriers, arma::uword spacing);

    // Reorders the columns of `current` so every codeword it shares with `previous` sits on the same
    // stream. The remaining codewords fill the free streams in their selection order.
    void align_streams(const DigitalPrecoder &previous, DigitalPrecoder &current);

    // select_codewords at every pilot, each pilot's streams aligned to the pilot before it.
    PilotGrid assign_pilots(const arma::cx_cube &h_eff, const Codebook &codebook, arma::uword spacing,
                            arma::uword num_streams);

    // Quantity compared at each binary-search probe.
    //  joint      : ||H_eff[k] V_q||_F vs ||H_eff[k] V_{q+1}||_F, one switch point per interval shared
    //               by every stream whose end codewords differ, so F[k] is always V_q or V_{q+1}
    //  per_stream : ||H_eff[k] v_q^t|| vs ||H_eff[k] v_{q+1}^t||, an independent search per stream
    enum class SwitchRule
    {
        joint,
        per_stream
    };
    std::string_view to_string(SwitchRule r);
    SwitchRule switch_rule_from_string(std::string_view name);

    // Binary-search switching-point interpolation between neighbouring pilot codewords.
    PrecoderAssignment hierarchical_interpolate(const arma::cx_cube &h_eff, const PilotGrid &grid,
                                                SwitchRule rule = SwitchRule::joint);

    // Linear blend of the end precoders, columns renormalized.
    PrecoderAssignment interpolate_gaussian(const PilotGrid &grid);

    // Great-circle interpolation of each column pair after aligning the global phase.
    PrecoderAssignment interpolate_geodesic(const PilotGrid &grid);

    // Interior subcarriers copy their left pilot.
    PrecoderAssignment cluster_simple(const PilotGrid &grid);

    // One precoder per block of `spacing` subcarriers, chosen greedily to maximise the block-summed gain.
    PrecoderAssignment cluster_snr_max(const arma::cx_cube &h_eff, const Codebook &codebook, arma::uword spacing,
                                       arma::uword num_streams);

    // Full-feedback reference: select_codewords at every subcarrier.
    PrecoderAssignment per_subcarrier_exhaustive(const arma::cx_cube &h_eff, const Codebook &codebook,
                                                 arma::uword num_streams);

    // Dispatcher used by the harness and the CLI. `grid` must come from the same h_eff.
    PrecoderAssignment assign(Method method, const arma::cx_cube &h_eff, const Codebook &codebook, const PilotGrid &grid,
                              SwitchRule rule = SwitchRule::joint);

    // Diagnostics dump, header "k,stream,codeword_index,method", k and stream 1-based.
    void write_assignment_csv(std::ostream &out, const PrecoderAssignment &assignment);
}

#endif
