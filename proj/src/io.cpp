// SPDX-License-Identifier: Apache-2.0
//
// hr6dma: max-min beam coverage with hierarchically rotatable arrays
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

#include "hr6dma/io.hpp"
#include "hr6dma/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace hr6dma
{
    namespace
    {
        std::string num(double v)
        {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        }

        std::ostream &log_stream(const RunOptions &opt)
        {
            return opt.log ? *opt.log : std::clog;
        }

        void say(const RunOptions &opt, const std::string &line)
        {
            if (!opt.quiet)
                log_stream(opt) << line << '\n';
        }

        Json vector_json(const Eigen::VectorXd &v)
        {
            Json out = Json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i)
                out.push_back(v(i));
            return out;
        }

        Json iterations_json(const IterationCounts &c)
        {
            return Json{{"ao", c.ao}, {"sca", c.sca}, {"sdp_solves", c.sdr}};
        }

        bool to_stdout(const std::filesystem::path &p)
        {
            return p.empty() || p == "-";
        }

        std::filesystem::path sidecar(const std::filesystem::path &p, const char *suffix)
        {
            return std::filesystem::path(p.string() + suffix);
        }

        // Runs `body`, mapping configuration problems to exit 2 and everything else to exit 1.
        template <typename Fn>
        int guarded(const RunOptions &opt, Fn &&body)
        {
            try
            {
                return body();
            }
            catch (const ConfigError &e)
            {
                log_stream(opt) << "config error: " << e.what() << '\n';
                return exit_config_error;
            }
        }
    }

    double to_db(double linear)
    {
        if (!(linear > 0.0))
            return -120.0;
        return std::max(10.0 * std::log10(linear), -120.0);
    }

    void write_output(const std::filesystem::path &path, const std::string &text)
    {
        if (to_stdout(path))
        {
            std::cout << text;
            std::cout.flush();
            return;
        }
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("output: cannot write " + path.string());
        out << text;
    }

    Json report_json(const SolveReport &r, const AngularGrid &grid, const ArrayConfig &cfg)
    {
        Json w_re = Json::array(), w_im = Json::array();
        for (Eigen::Index n = 0; n < r.inner.w.weights().size(); ++n)
        {
            w_re.push_back(r.inner.w.weights()(n).real());
            w_im.push_back(r.inner.w.weights()(n).imag());
        }
        Json curve = Json::array();
        for (const PsiPoint &p : r.per_psi_curve)
            curve.push_back(Json{{"psi", p.psi}, {"worst_gain", p.worst_gain}});
        const WorstCase wc = worst_case_gain(grid, r.state(), r.inner.w, cfg);
        return Json{{"worst_gain", r.inner.worst_gain},
                    {"worst_gain_db", to_db(r.inner.worst_gain)},
                    {"worst_index", wc.index},
                    {"psi_star", r.psi_star},
                    {"phi", vector_json(r.inner.phi)},
                    {"w_real", w_re},
                    {"w_imag", w_im},
                    {"trace", r.inner.trace},
                    {"termination", std::string(to_string(r.inner.termination))},
                    {"per_psi_curve", curve},
                    {"iterations", iterations_json(r.inner.iters)},
                    {"total_iterations", iterations_json(r.total_iters)},
                    {"sdr", Json{{"steps", r.sdr.steps},
                                 {"rank_reached", r.sdr.rank_reached},
                                 {"rank_cap_hits", r.sdr.rank_cap_hits},
                                 {"solver_warnings", r.sdr.solver_warnings},
                                 {"min_converged_rank_metric", r.sdr.min_converged_rank_metric},
                                 {"max_modulus_error", r.sdr.max_modulus_error}}},
                    {"warm_started", r.warm_started},
                    {"wall_time_s", r.wall_time_s}};
    }

    Json solve_report_json(const Scenario &scenario, const AngularGrid &grid, const std::vector<SchemeResult> &results)
    {
        Json schemes = Json::object();
        for (const SchemeResult &res : results)
        {
            Json entry = report_json(res.report, grid, scenario.array);
            if (scenario.link)
            {
                const double theta = grid.samples.at(entry["worst_index"].get<std::size_t>());
                entry["worst_received_power"] =
                    received_power(theta, res.report.state(), res.report.inner.w, scenario.array, *scenario.link);
            }
            schemes[std::string(to_string(res.id))] = std::move(entry);
        }
        return Json{{"version", artifact_version},
                    {"scenario", to_json(scenario)},
                    {"grid", Json{{"samples", grid.samples}, {"per_interval_counts", grid.per_interval_counts}}},
                    {"schemes", schemes}};
    }

    int run_solve(const Scenario &scenario, const std::filesystem::path &out, const RunOptions &opt)
    {
        return guarded(opt, [&] {
            scenario.validate();
            const AngularGrid grid = scenario.grid();
            say(opt, "solving " + std::to_string(scenario.schemes.size()) + " scheme(s) on " +
                         std::to_string(grid.size()) + " samples");
            try
            {
                const auto results = compare_all(scenario.region, grid, scenario.array, scenario.algo, scenario.schemes);
                for (const SchemeResult &r : results)
                    say(opt, std::string(to_string(r.id)) + ": worst gain " + num(r.report.inner.worst_gain) + " (" +
                                 num(to_db(r.report.inner.worst_gain)) + " dB)");
                write_output(out, solve_report_json(scenario, grid, results).dump(2) + "\n");
                return int(exit_ok);
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                Json partial{{"version", artifact_version},
                             {"scenario", to_json(scenario)},
                             {"schemes", Json::object()},
                             {"failure", Json{{"message", e.what()}}}};
                write_output(out, partial.dump(2) + "\n");
                log_stream(opt) << "solver failure: " << e.what() << '\n';
                return int(exit_solver_failure);
            }
        });
    }

    int run_sweep(const Scenario &scenario, const std::vector<double> &widths_rad, const std::filesystem::path &out,
                  const RunOptions &opt)
    {
        return guarded(opt, [&] {
            if (widths_rad.empty())
                throw ConfigError("widths: at least one width is required");
            std::string csv = std::string(sweep_csv_header) + "\n";
            Json meta_widths = Json::array();
            int code = exit_ok;
            for (std::size_t i = 0; i < widths_rad.size(); ++i)
            {
                const double width = widths_rad[i];
                if (!(width >= 0.0) || !std::isfinite(width))
                    throw ConfigError("widths[" + std::to_string(i) + "]: must be finite and >= 0");
                Scenario s = scenario;
                s.region = CoverageRegion::symmetric(width);
                s.validate();
                const double deg = width * 180.0 / std::numbers::pi;
                const char *regime = deg < narrow_width_deg ? "narrow" : (deg > wide_width_deg ? "wide" : "intermediate");
                meta_widths.push_back(Json{{"width_rad", width}, {"width_deg", deg}, {"regime", regime}});
                say(opt, "width " + num(deg) + " deg");
                try
                {
                    const auto results = compare_all(s.region, s.grid(), s.array, s.algo, s.schemes);
                    for (const SchemeResult &r : results)
                        csv += num(width) + "," + std::string(to_string(r.id)) + "," + num(r.report.inner.worst_gain) +
                               "," + num(to_db(r.report.inner.worst_gain)) + "," + num(r.report.psi_star) + "," +
                               num(r.report.wall_time_s * 1000.0) + "\n";
                }
                catch (const ConfigError &)
                {
                    throw;
                }
                catch (const std::exception &e)
                {
                    log_stream(opt) << "solver failure at width " << num(width) << ": " << e.what() << '\n';
                    meta_widths.back()["failure"] = e.what();
                    code = exit_solver_failure;
                }
            }
            write_output(out, csv);
            if (!to_stdout(out))
            {
                Json meta{{"version", artifact_version},
                          {"narrow_below_deg", narrow_width_deg},
                          {"wide_above_deg", wide_width_deg},
                          {"widths", meta_widths},
                          {"scenario", to_json(scenario)}};
                write_output(sidecar(out, ".meta.json"), meta.dump(2) + "\n");
            }
            return code;
        });
    }

    std::string pattern_csv(const std::vector<SchemeResult> &results, const ArrayConfig &cfg, double theta_min,
                            double theta_max, int n_samples)
    {
        std::string csv = std::string(pattern_csv_header) + "\n";
        for (int k = 0; k < n_samples; ++k)
        {
            const double theta =
                n_samples == 1 ? theta_min : theta_min + (theta_max - theta_min) * k / (n_samples - 1);
            for (const SchemeResult &r : results)
            {
                const double g = beamforming_gain(theta, r.report.state(), r.report.inner.w, cfg);
                csv += num(theta) + "," + std::string(to_string(r.id)) + "," + num(g) + "," + num(to_db(g)) + "\n";
            }
        }
        return csv;
    }

    int run_pattern(const Scenario &scenario, double theta_min, double theta_max, int n_samples,
                    const std::filesystem::path &out, const RunOptions &opt)
    {
        return guarded(opt, [&] {
            if (n_samples < 1)
                throw ConfigError("samples: must be >= 1");
            if (!(theta_min <= theta_max))
                throw ConfigError("theta range: theta_min must not exceed theta_max");
            scenario.validate();
            const AngularGrid grid = scenario.grid();
            try
            {
                const auto results = compare_all(scenario.region, grid, scenario.array, scenario.algo, scenario.schemes);
                write_output(out, pattern_csv(results, scenario.array, theta_min, theta_max, n_samples));
                if (!to_stdout(out))
                    write_output(sidecar(out, ".configs.json"),
                                 solve_report_json(scenario, grid, results).dump(2) + "\n");
                return int(exit_ok);
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                log_stream(opt) << "solver failure: " << e.what() << '\n';
                return int(exit_solver_failure);
            }
        });
    }

    OracleJob parse_oracle_job(const std::string &text)
    {
        Json j;
        try
        {
            j = Json::parse(text);
        }
        catch (const Json::parse_error &e)
        {
            throw ParseError(std::string("oracle spec: ") + e.what());
        }
        if (!j.is_object())
            throw SchemaError("oracle spec: expected an object");
        OracleJob job;
        Json scenario_part = Json::object();
        for (const char *key : {"array", "region", "total_q"})
            if (j.contains(key))
                scenario_part[key] = j[key];
        const Scenario s = scenario_from_json(scenario_part);
        job.array = s.array;
        job.spec.n_antennas = s.array.n_antennas;
        job.spec.grid = s.grid();
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            const std::string &key = it.key();
            if (key == "array" || key == "region" || key == "total_q")
                continue;
            int *dst = key == "n_antennas"          ? &job.spec.n_antennas
                       : key == "phase_grid_points" ? &job.spec.phase_grid_points
                       : key == "phi_grid_points"   ? &job.spec.phi_grid_points
                       : key == "psi_grid_points"   ? &job.spec.psi_grid_points
                       : key == "threads"           ? &job.spec.threads
                                                    : nullptr;
            if (!dst)
                throw SchemaError(key + ": unknown field");
            if (!it->is_number_integer())
                throw SchemaError(key + ": expected an integer");
            *dst = it->get<int>();
        }
        job.array.n_antennas = job.spec.n_antennas;
        job.spec.validate();
        return job;
    }

    int run_oracle(const std::filesystem::path &spec_path, const std::filesystem::path &out, const RunOptions &opt)
    {
        return guarded(opt, [&] {
            std::ifstream in(spec_path);
            if (!in)
                throw ConfigError("oracle spec: cannot open " + spec_path.string());
            std::stringstream buf;
            buf << in.rdbuf();
            const OracleJob job = parse_oracle_job(buf.str());
            say(opt, "enumerating " + num(job.spec.configuration_count()) + " configurations");
            const auto r = oracle::brute_force_maxmin(job.spec, job.array);
            Json w_phase = vector_json(r.w.phases());
            Json result{{"version", artifact_version},
                        {"worst_gain", r.worst_gain},
                        {"worst_gain_db", to_db(r.worst_gain)},
                        {"psi", r.state.psi},
                        {"phi", vector_json(r.state.phi)},
                        {"w_phase", w_phase},
                        {"lattice_spacing", Json{{"phase", r.spacing.phase}, {"phi", r.spacing.phi}, {"psi", r.spacing.psi}}},
                        {"evaluated", r.evaluated},
                        {"array", to_json(job.array)},
                        {"grid", Json{{"samples", job.spec.grid.samples}}}};
            write_output(out, result.dump(2) + "\n");
            return int(exit_ok);
        });
    }
}
