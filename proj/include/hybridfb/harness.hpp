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

#ifndef hybridfb_harness_H
#define hybridfb_harness_H

#include "hybridfb/assignment.hpp"
#include "hybridfb/codebook.hpp"
#include "hybridfb/config.hpp"
#include "hybridfb/link.hpp"

#include <armadillo>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hfb
{
    // Which equivalent channel feeds the log-det rate.
    //  combined : H_eq = W H_eff F with the configured digital combiner
    //  direct   : H_eq = H_eff F
    enum class SeMode
    {
        combined,
        direct
    };

    struct ExperimentSpec
    {
        SystemConfig system;
        std::vector<double> snr_grid{-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
        std::vector<Method> methods = all_methods();
        arma::uword num_realizations = 10;
        arma::uword num_symbols_per_snr = 10;
        std::vector<double> rho_grid{1.0, 0.9, 0.7};
        std::uint64_t master_seed = 1;
        std::filesystem::path output_dir; // empty = keep results in memory only

        SwitchRule switch_rule = SwitchRule::joint;
        Equalizer equalizer = Equalizer::mmse;
        SeMode se_mode = SeMode::combined;
        NoiseModel noise_model = NoiseModel::colored;

        std::filesystem::path codebook_file; // empty = train from channel draws
        arma::uword codebook_training_realizations = 20;
        LloydOptions lloyd;

        void validate() const;
    };

    // Consumes the experiment keys plus every SystemConfig key, rejecting unknown ones.
    ExperimentSpec experiment_from(KeyValueConfig &kv);
    ExperimentSpec load_experiment(const std::filesystem::path &file);
    std::string canonical_text(const ExperimentSpec &spec);
    std::string spec_hash(const ExperimentSpec &spec);

    struct RawRow
    {
        arma::uword realization = 0;
        Method method = Method::hierarchical;
        double snr_db = 0.0;
        double rho = 1.0;
        double se = 0.0;
        double ber = 0.0;
        std::uint64_t bit_errors = 0;
        std::uint64_t bits = 0;
        std::uint64_t feedback_bits_paper = 0;
        std::uint64_t feedback_bits_per_stream = 0;
        std::uint64_t eval_count = 0;
        arma::uword zf_flagged = 0;
        arma::uword collisions = 0;
        double wall_time_s = 0.0; // assignment time, pilot selection included for pilot-based methods
    };

    struct CurvePoint
    {
        Method method = Method::hierarchical;
        double snr_db = 0.0;
        double rho = 1.0;
        double mean_se = 0.0;
        double mean_ber = 0.0;
        double feedback_bits_paper = 0.0;
        double feedback_bits_per_stream = 0.0;
        double eval_count = 0.0;
        arma::uword realizations = 0;
        double mean_wall_time_s = 0.0; // summary.json only
    };

    struct BeamAudit
    {
        arma::uword realization = 0;
        std::vector<arma::uword> tx_paths, rx_paths;
        std::vector<double> aod, aoa;
    };

    struct RunRecord
    {
        std::string spec_hash;
        ExperimentSpec spec;
        std::vector<RawRow> raw;        // ordered by (realization, rho, method, snr)
        std::vector<CurvePoint> curves; // ordered by (method, rho, snr)
        std::vector<BeamAudit> beams;
    };

    // Codebook used when the spec does not name a file: Lloyd on training_set draws seeded from master_seed.
    Codebook spec_codebook(const ExperimentSpec &spec);

    // Runs every realization. `codebook` overrides the spec's codebook source when given.
    // Throws IoError before any computation if output_dir is set but not writable.
    RunRecord run_experiment(const ExperimentSpec &spec, const Codebook *codebook = nullptr);

    // Group raw rows by (method, snr, rho) and average them.
    std::vector<CurvePoint> aggregate(const std::vector<RawRow> &raw, const ExperimentSpec &spec);

    // summary.json, curves.csv, raw.csv
    void write_outputs(const RunRecord &record, const std::filesystem::path &dir);
    void write_curves_csv(std::ostream &out, const std::vector<CurvePoint> &curves);
    void write_raw_csv(std::ostream &out, const std::vector<RawRow> &raw);
    std::vector<CurvePoint> read_curves_csv(std::istream &in);

    std::string to_string(Equalizer e);
    std::string to_string(SeMode m);
    std::string to_string(NoiseModel n);
}

#endif
