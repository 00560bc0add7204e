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

#include "hybridfb/harness.hpp"
#include "hybridfb/beams.hpp"
#include "hybridfb/channel.hpp"
#include "hybridfb/error.hpp"
#include "hybridfb/numfmt.hpp"
#include "hybridfb/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace hfb
{
    std::string to_string(Equalizer e) { return e == Equalizer::zf ? "zf" : "mmse"; }
    std::string to_string(SeMode m) { return m == SeMode::combined ? "combined" : "direct"; }
    std::string to_string(NoiseModel n) { return n == NoiseModel::colored ? "colored" : "white"; }

    void ExperimentSpec::validate() const
    {
        system.validate();
        if (snr_grid.empty() || rho_grid.empty())
            throw InvalidRequest("experiment: snr_grid and rho_grid must be non-empty");
        if (num_realizations < 1)
            throw InvalidRequest("experiment: num_realizations must be at least 1");
        for (double r : rho_grid)
            if (!(r >= 0.0 && r <= 1.0))
                throw InvalidRequest("experiment: rho values must lie in [0, 1]");
        if (codebook_file.empty() && codebook_training_realizations == 0)
            throw InvalidRequest("experiment: need a codebook_file or codebook_training_realizations > 0");
    }

    ExperimentSpec experiment_from(KeyValueConfig &kv)
    {
        ExperimentSpec s;
        s.system = system_config_from(kv);
        if (auto v = kv.take("snr_grid"))
            s.snr_grid = parse_real_grid(*v, "snr_grid");
        if (auto v = kv.take("rho_grid"))
            s.rho_grid = parse_real_grid(*v, "rho_grid");
        if (auto v = kv.take("methods"))
        {
            s.methods.clear();
            if (!trim(*v).empty())
                for (const auto &name : split(*v, ','))
                    s.methods.push_back(method_from_string(name));
        }
        if (auto v = kv.take("num_realizations"))
            s.num_realizations = parse_unsigned(*v, "num_realizations");
        if (auto v = kv.take("num_symbols"))
            s.num_symbols_per_snr = parse_unsigned(*v, "num_symbols");
        if (auto v = kv.take("seed"))
            s.master_seed = parse_unsigned(*v, "seed");
        if (auto v = kv.take("output_dir"))
            s.output_dir = *v;
        if (auto v = kv.take("switch_rule"))
            s.switch_rule = switch_rule_from_string(*v);
        if (auto v = kv.take("equalizer"))
        {
            if (*v == "zf")
                s.equalizer = Equalizer::zf;
            else if (*v == "mmse")
                s.equalizer = Equalizer::mmse;
            else
                throw InvalidRequest("equalizer must be 'zf' or 'mmse'");
        }
        if (auto v = kv.take("se_mode"))
        {
            if (*v == "combined")
                s.se_mode = SeMode::combined;
            else if (*v == "direct")
                s.se_mode = SeMode::direct;
            else
                throw InvalidRequest("se_mode must be 'combined' or 'direct'");
        }
        if (auto v = kv.take("noise_model"))
        {
            if (*v == "colored")
                s.noise_model = NoiseModel::colored;
            else if (*v == "white")
                s.noise_model = NoiseModel::white;
            else
                throw InvalidRequest("noise_model must be 'colored' or 'white'");
        }
        if (auto v = kv.take("codebook_file"))
            s.codebook_file = *v;
        if (auto v = kv.take("codebook_training_realizations"))
            s.codebook_training_realizations = parse_unsigned(*v, "codebook_training_realizations");
        if (auto v = kv.take("lloyd_max_iters"))
            s.lloyd.max_iters = static_cast<unsigned>(parse_unsigned(*v, "lloyd_max_iters"));
        if (auto v = kv.take("lloyd_tol"))
            s.lloyd.tol = parse_real(*v, "lloyd_tol");
        kv.require_all_consumed();
        s.validate();
        return s;
    }

    ExperimentSpec load_experiment(const std::filesystem::path &file)
    {
        auto kv = KeyValueConfig::load(file);
        return experiment_from(kv);
    }

    namespace
    {
        std::string join_reals(const std::vector<double> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? "," : "") + format_real(v[i]);
            return out;
        }

        std::string join_methods(const std::vector<Method> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? "," : "") + std::string(to_string(v[i]));
            return out;
        }

        bool pilot_based(Method m)
        {
            return m != Method::cluster_snr && m != Method::per_subcarrier_exhaustive;
        }

        void ensure_writable(const std::filesystem::path &dir)
        {
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec)
                throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
            const auto probe = dir / ".write_probe";
            {
                std::ofstream out(probe);
                if (!out || !(out << "x") || !out.flush())
                    throw IoError("output directory is not writable: " + dir.string());
            }
            std::filesystem::remove(probe, ec);
        }
    }

    std::string canonical_text(const ExperimentSpec &s)
    {
        std::ostringstream os;
        os << canonical_text(s.system)
           << "snr_grid = " << join_reals(s.snr_grid) << "\n"
           << "rho_grid = " << join_reals(s.rho_grid) << "\n"
           << "methods = " << join_methods(s.methods) << "\n"
           << "num_realizations = " << s.num_realizations << "\n"
           << "num_symbols = " << s.num_symbols_per_snr << "\n"
           << "seed = " << s.master_seed << "\n"
           << "switch_rule = " << to_string(s.switch_rule) << "\n"
           << "equalizer = " << to_string(s.equalizer) << "\n"
           << "se_mode = " << to_string(s.se_mode) << "\n"
           << "noise_model = " << to_string(s.noise_model) << "\n"
           << "codebook_file = " << s.codebook_file.string() << "\n"
           << "codebook_training_realizations = " << s.codebook_training_realizations << "\n"
           << "lloyd_max_iters = " << s.lloyd.max_iters << "\n"
           << "lloyd_tol = " << format_real(s.lloyd.tol) << "\n";
        return os.str();
    }

    std::string spec_hash(const ExperimentSpec &spec)
    {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(spec))));
        return buf;
    }

    Codebook spec_codebook(const ExperimentSpec &spec)
    {
        if (!spec.codebook_file.empty())
            return load_codebook(spec.codebook_file);
        Rng rng(derive_seed(spec.master_seed, SeedPurpose::codebook, {}));
        const arma::cx_mat training = training_set(spec.system, spec.codebook_training_realizations, rng);
        Rng init(derive_seed(spec.master_seed, SeedPurpose::codebook_init, {}));
        return train_lloyd(training, spec.system.codebook_bits, init, spec.lloyd).codebook;
    }

    RunRecord run_experiment(const ExperimentSpec &spec, const Codebook *codebook)
    {
        spec.validate();
        if (!spec.output_dir.empty())
            ensure_writable(spec.output_dir);

        const SystemConfig &cfg = spec.system;
        const Codebook cb = codebook ? *codebook : spec_codebook(spec);
        if (cb.dim() != cfg.num_tx_rf || cb.bits != cfg.codebook_bits)
            throw InvalidRequest("codebook shape (" + std::to_string(cb.bits) + " bits, dim " + std::to_string(cb.dim()) +
                                 ") does not match the system config");

        using clock = std::chrono::steady_clock;
        auto seconds = [](clock::duration d)
        { return std::chrono::duration<double>(d).count(); };

        RunRecord rec;
        rec.spec = spec;
        rec.spec_hash = spec_hash(spec);

        for (arma::uword r = 0; r < spec.num_realizations; ++r)
        {
            Rng channel_rng(derive_seed(spec.master_seed, SeedPurpose::channel, {r}));
            const PathSet paths = draw_paths(cfg, channel_rng);
            const arma::cx_cube taps = delay_taps(paths, cfg);
            const AnalogBeamformers beams = build_analog(paths, rank_paths(paths, cfg), cfg, &taps);
            // W^H (sum_d H(d) e^{..}) F = sum_d (W^H H(d) F) e^{..}: transform the small effective taps.
            const arma::cx_cube h_true = to_frequency(effective_channel(taps, beams), cfg.num_subcarriers);

            BeamAudit audit;
            audit.realization = r;
            audit.tx_paths = beams.tx_paths;
            audit.rx_paths = beams.rx_paths;
            for (auto i : beams.tx_paths)
                audit.aod.push_back(paths.aod(i));
            for (auto i : beams.rx_paths)
                audit.aoa.push_back(paths.aoa(i));
            rec.beams.push_back(std::move(audit));

            for (arma::uword ri = 0; ri < spec.rho_grid.size(); ++ri)
            {
                const double rho = spec.rho_grid[ri];
                Rng csi_rng(derive_seed(spec.master_seed, SeedPurpose::csi_error, {r, ri}));
                const arma::cx_cube h_sel = corrupt_csi(h_true, rho, csi_rng);

                const auto grid_start = clock::now();
                const PilotGrid grid = assign_pilots(h_sel, cb, cfg.pilot_spacing, cfg.num_streams);
                const double grid_time = seconds(clock::now() - grid_start);

                for (Method m : spec.methods)
                {
                    const auto start = clock::now();
                    PrecoderAssignment a = assign(m, h_sel, cb, grid, spec.switch_rule);
                    const double wall = seconds(clock::now() - start) + (pilot_based(m) ? grid_time : 0.0);
                    a = normalize_power(std::move(a), beams.precoder);

                    for (arma::uword si = 0; si < spec.snr_grid.size(); ++si)
                    {
                        const double snr = spec.snr_grid[si];
                        const double P = total_power_for_snr(snr, cfg.num_subcarriers, cfg.noise_variance);
                        const EqualizerSpec eq = EqualizerSpec::make(spec.equalizer, P, cfg.num_subcarriers,
                                                                     cfg.num_streams, cfg.noise_variance,
                                                                     beams.combiner, spec.noise_model);
                        const CombinerSet W = combiners(h_true, a, eq);

                        RawRow row;
                        row.realization = r;
                        row.method = m;
                        row.snr_db = snr;
                        row.rho = rho;
                        row.se = spec.se_mode == SeMode::combined
                                     ? spectral_efficiency(h_true, a, W.W, P, cfg.noise_variance).spectral_efficiency
                                     : spectral_efficiency_direct(h_true, a, P, cfg.noise_variance).spectral_efficiency;
                        // Same symbols and noise for every method at a given (r, rho, snr): paired comparisons.
                        Rng ber_rng(derive_seed(spec.master_seed, SeedPurpose::ber, {r, ri, si}));
                        const BerResult ber = simulate_ber(h_true, beams.combiner, a, W.W, P, cfg.noise_variance,
                                                           spec.num_symbols_per_snr, ber_rng);
                        row.ber = ber.ber;
                        row.bit_errors = ber.bit_errors;
                        row.bits = ber.bits;
                        row.feedback_bits_paper = a.feedback_bits_paper;
                        row.feedback_bits_per_stream = a.feedback_bits_per_stream;
                        row.eval_count = a.eval_count;
                        row.zf_flagged = W.flagged.size();
                        row.collisions = a.collisions;
                        row.wall_time_s = wall;
                        rec.raw.push_back(row);
                    }
                }
            }
        }

        rec.curves = aggregate(rec.raw, spec);
        if (!spec.output_dir.empty())
            write_outputs(rec, spec.output_dir);
        return rec;
    }

    std::vector<CurvePoint> aggregate(const std::vector<RawRow> &raw, const ExperimentSpec &spec)
    {
        struct Acc
        {
            double se = 0, ber = 0, fbp = 0, fbs = 0, ev = 0, wall = 0;
            arma::uword n = 0;
        };
        auto index_of = [](const std::vector<double> &grid, double v)
        {
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (grid[i] == v)
                    return i;
            return grid.size();
        };
        std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Acc> groups;
        std::map<Method, std::size_t> method_pos;
        for (std::size_t i = 0; i < spec.methods.size(); ++i)
            method_pos.emplace(spec.methods[i], i);

        for (const auto &row : raw)
        {
            auto &g = groups[{method_pos.at(row.method), index_of(spec.rho_grid, row.rho), index_of(spec.snr_grid, row.snr_db)}];
            g.se += row.se;
            g.ber += row.ber;
            g.fbp += double(row.feedback_bits_paper);
            g.fbs += double(row.feedback_bits_per_stream);
            g.ev += double(row.eval_count);
            g.wall += row.wall_time_s;
            ++g.n;
        }

        std::vector<CurvePoint> out;
        for (const auto &[key, g] : groups)
        {
            const auto &[mi, ri, si] = key;
            CurvePoint c;
            c.method = spec.methods[mi];
            c.rho = spec.rho_grid[ri];
            c.snr_db = spec.snr_grid[si];
            const double n = double(g.n);
            c.mean_se = g.se / n;
            c.mean_ber = g.ber / n;
            c.feedback_bits_paper = g.fbp / n;
            c.feedback_bits_per_stream = g.fbs / n;
            c.eval_count = g.ev / n;
            c.mean_wall_time_s = g.wall / n;
            c.realizations = g.n;
            out.push_back(c);
        }
        return out;
    }

    static const char *kCurvesHeader =
        "method,snr_db,rho,mean_se,mean_ber,feedback_bits_paper,feedback_bits_per_stream,eval_count,realizations";

    void write_curves_csv(std::ostream &out, const std::vector<CurvePoint> &curves)
    {
        out << kCurvesHeader << "\n";
        for (const auto &c : curves)
            out << to_string(c.method) << "," << format_real(c.snr_db) << "," << format_real(c.rho) << ","
                << format_real(c.mean_se) << "," << format_real(c.mean_ber) << ","
                << format_real(c.feedback_bits_paper) << "," << format_real(c.feedback_bits_per_stream) << ","
                << format_real(c.eval_count) << "," << c.realizations << "\n";
    }

    void write_raw_csv(std::ostream &out, const std::vector<RawRow> &raw)
    {
        out << "realization,method,snr_db,rho,se,ber,bit_errors,bits,feedback_bits_paper,feedback_bits_per_stream,"
               "eval_count,zf_flagged,collisions,wall_time_s\n";
        for (const auto &r : raw)
            out << r.realization << "," << to_string(r.method) << "," << format_real(r.snr_db) << ","
                << format_real(r.rho) << "," << format_real(r.se) << "," << format_real(r.ber) << ","
                << r.bit_errors << "," << r.bits << "," << r.feedback_bits_paper << ","
                << r.feedback_bits_per_stream << "," << r.eval_count << "," << r.zf_flagged << ","
                << r.collisions << "," << format_real(r.wall_time_s) << "\n";
    }

    std::vector<CurvePoint> read_curves_csv(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line) || trim(line) != kCurvesHeader)
            throw InvalidRequest("curves.csv: unexpected header");
        std::vector<CurvePoint> out;
        std::size_t line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (trim(line).empty())
                continue;
            auto f = split(line, ',');
            if (f.size() != 9)
                throw InvalidRequest("curves.csv: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                                     " fields, expected 9");
            CurvePoint c;
            c.method = method_from_string(f[0]);
            c.snr_db = parse_real(f[1], "snr_db");
            c.rho = parse_real(f[2], "rho");
            c.mean_se = parse_real(f[3], "mean_se");
            c.mean_ber = parse_real(f[4], "mean_ber");
            c.feedback_bits_paper = parse_real(f[5], "feedback_bits_paper");
            c.feedback_bits_per_stream = parse_real(f[6], "feedback_bits_per_stream");
            c.eval_count = parse_real(f[7], "eval_count");
            c.realizations = parse_unsigned(f[8], "realizations");
            out.push_back(c);
        }
        return out;
    }

    namespace
    {
        void write_file(const std::filesystem::path &file, const std::string &content)
        {
            std::ofstream out(file, std::ios::binary);
            if (!out || !(out << content) || !out.flush())
                throw IoError("failed writing " + file.string());
        }

        nlohmann::ordered_json spec_json(const ExperimentSpec &s)
        {
            nlohmann::ordered_json j;
            std::istringstream text(canonical_text(s));
            auto kv = KeyValueConfig::parse(text, "spec");
            for (const auto &key : kv.unconsumed())
                j[key] = *kv.take(key);
            return j;
        }
    }

    void write_outputs(const RunRecord &record, const std::filesystem::path &dir)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

        std::ostringstream curves, raw;
        write_curves_csv(curves, record.curves);
        write_raw_csv(raw, record.raw);

        nlohmann::ordered_json j;
        j["spec_hash"] = record.spec_hash;
        j["spec"] = spec_json(record.spec);
        auto &arr = j["curves"] = nlohmann::ordered_json::array();
        for (const auto &c : record.curves)
            arr.push_back({{"method", std::string(to_string(c.method))},
                           {"snr_db", c.snr_db},
                           {"rho", c.rho},
                           {"mean_se", c.mean_se},
                           {"mean_ber", c.mean_ber},
                           {"feedback_bits_paper", c.feedback_bits_paper},
                           {"feedback_bits_per_stream", c.feedback_bits_per_stream},
                           {"eval_count", c.eval_count},
                           {"mean_wall_time_s", c.mean_wall_time_s},
                           {"realizations", c.realizations}});
        auto &beams = j["beams"] = nlohmann::ordered_json::array();
        for (const auto &b : record.beams)
            beams.push_back({{"realization", b.realization},
                             {"tx_paths", b.tx_paths},
                             {"rx_paths", b.rx_paths},
                             {"aod", b.aod},
                             {"aoa", b.aoa}});

        write_file(dir / "summary.json", j.dump(2) + "\n");
        write_file(dir / "curves.csv", curves.str());
        write_file(dir / "raw.csv", raw.str());
    }
}
