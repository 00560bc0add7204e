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

// Command line front end: experiment runs, codebook training and assignment dumps.

#include "hybridfb/assignment.hpp"
#include "hybridfb/beams.hpp"
#include "hybridfb/channel.hpp"
#include "hybridfb/codebook.hpp"
#include "hybridfb/error.hpp"
#include "hybridfb/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace
{
    hfb::ExperimentSpec load_spec(const std::string &config, const std::map<std::string, std::string> &overrides)
    {
        auto kv = hfb::KeyValueConfig::load(config);
        for (const auto &[k, v] : overrides)
            kv.set(k, v);
        return hfb::experiment_from(kv);
    }

    int run(const std::string &config, const std::map<std::string, std::string> &overrides)
    {
        auto spec = load_spec(config, overrides);
        if (spec.output_dir.empty())
            spec.output_dir = "results";
        const auto rec = hfb::run_experiment(spec);
        std::cout << "wrote " << rec.curves.size() << " curve points from " << rec.raw.size() << " rows to "
                  << spec.output_dir.string() << " (spec " << rec.spec_hash << ")\n";
        return 0;
    }

    int train(const std::string &config, const std::string &out)
    {
        auto spec = load_spec(config, {});
        spec.codebook_file.clear();
        const auto cb = hfb::spec_codebook(spec);
        hfb::save_codebook(cb, out);
        std::cout << "wrote " << cb.size() << " codewords of dimension " << cb.dim() << " to " << out << "\n";
        return 0;
    }

    int dump(const std::string &config, const std::string &method, const std::string &out, arma::uword realization,
             const std::map<std::string, std::string> &overrides)
    {
        const auto spec = load_spec(config, overrides);
        const auto &cfg = spec.system;
        const auto m = hfb::method_from_string(method);
        const auto cb = hfb::spec_codebook(spec);

        hfb::Rng channel_rng(hfb::derive_seed(spec.master_seed, hfb::SeedPurpose::channel, {realization}));
        const auto paths = hfb::draw_paths(cfg, channel_rng);
        const auto taps = hfb::delay_taps(paths, cfg);
        const auto beams = hfb::build_analog(paths, hfb::rank_paths(paths, cfg), cfg, &taps);
        const auto h_true = hfb::to_frequency(hfb::effective_channel(taps, beams), cfg.num_subcarriers);
        hfb::Rng csi_rng(hfb::derive_seed(spec.master_seed, hfb::SeedPurpose::csi_error, {realization, 0}));
        const auto h_sel = hfb::corrupt_csi(h_true, cfg.csi_quality, csi_rng);

        const auto grid = hfb::assign_pilots(h_sel, cb, cfg.pilot_spacing, cfg.num_streams);
        const auto a = hfb::assign(m, h_sel, cb, grid, spec.switch_rule);

        std::ofstream os(out);
        if (!os)
            throw hfb::IoError("cannot write " + out);
        hfb::write_assignment_csv(os, a);
        std::cout << "wrote " << a.num_subcarriers() * a.num_streams() << " rows to " << out
                  << " (feedback " << a.feedback_bits_paper << " bits closed-form, " << a.feedback_bits_per_stream
                  << " per-stream, " << a.eval_count << " evaluations)\n";
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Reduced-feedback hybrid precoding link simulator"};
    app.require_subcommand(1);

    std::string config, out, methods, snr, rho, method;
    std::uint64_t seed = 0;
    arma::uword realization = 0;

    auto *run_cmd = app.add_subcommand("run", "Monte-Carlo experiment; writes summary.json, curves.csv, raw.csv");
    run_cmd->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    auto *seed_opt = run_cmd->add_option("--seed", seed, "master seed");
    auto *out_opt = run_cmd->add_option("--out", out, "output directory");
    auto *methods_opt = run_cmd->add_option("--methods", methods, "comma separated method tags");
    auto *snr_opt = run_cmd->add_option("--snr", snr, "SNR grid lo:step:hi in dB");
    auto *rho_opt = run_cmd->add_option("--rho", rho, "comma separated CSI quality values");

    auto *cb_cmd = app.add_subcommand("codebook", "codebook utilities");
    cb_cmd->require_subcommand(1);
    auto *train_cmd = cb_cmd->add_subcommand("train", "train the Lloyd codebook from channel draws");
    train_cmd->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--out", out, "codebook file")->required();

    auto *dump_cmd = app.add_subcommand("dump-assignment", "per-subcarrier codeword indices as CSV");
    dump_cmd->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    dump_cmd->add_option("--method", method, "method tag")->required();
    dump_cmd->add_option("--out", out, "CSV file")->required();
    auto *dump_seed_opt = dump_cmd->add_option("--seed", seed, "master seed");
    dump_cmd->add_option("--realization", realization, "realization index");

    CLI11_PARSE(app, argc, argv);

    try
    {
        std::map<std::string, std::string> overrides;
        if (*run_cmd)
        {
            if (*seed_opt)
                overrides["seed"] = std::to_string(seed);
            if (*out_opt)
                overrides["output_dir"] = out;
            if (*methods_opt)
                overrides["methods"] = methods;
            if (*snr_opt)
                overrides["snr_grid"] = snr;
            if (*rho_opt)
                overrides["rho_grid"] = rho;
            return run(config, overrides);
        }
        if (*train_cmd)
            return train(config, out);
        if (*dump_cmd)
        {
            if (*dump_seed_opt)
                overrides["seed"] = std::to_string(seed);
            return dump(config, method, out, realization, overrides);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
