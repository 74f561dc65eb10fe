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

#include "hr6dma/errors.hpp"
#include "hr6dma/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <numbers>

using namespace hr6dma;

namespace
{
    struct Common
    {
        std::string config;
        std::string out = "-";
        bool quiet = false;
        std::optional<int> threads;
    };

    void add_common(CLI::App *cmd, Common &c, bool config_required)
    {
        auto *opt = cmd->add_option("--config", c.config, "Scenario JSON file")->check(CLI::ExistingFile);
        if (config_required)
            opt->required();
        cmd->add_option("--out", c.out, "Output file ('-' for stdout)");
        cmd->add_flag("--quiet", c.quiet, "Suppress progress lines");
        cmd->add_option("--threads", c.threads, "Outer-loop worker threads (0 = auto)")->check(CLI::NonNegativeNumber);
    }

    Scenario scenario_for(const Common &c)
    {
        Scenario s = c.config.empty() ? Scenario{} : load_scenario(c.config);
        if (c.threads)
            s.algo.threads = *c.threads;
        return s;
    }

    RunOptions options_for(const Common &c)
    {
        return RunOptions{c.quiet, &std::cerr};
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Max-min beam coverage with hierarchically rotatable arrays"};
    app.set_version_flag("--version", artifact_version);
    app.require_subcommand(1);

    Common solve_c, compare_c, sweep_c, pattern_c, oracle_c;

    auto *solve = app.add_subcommand("solve", "Run the scenario's schemes and write a JSON report");
    add_common(solve, solve_c, false);

    auto *compare = app.add_subcommand("compare", "Run all six schemes and write a JSON report");
    add_common(compare, compare_c, false);

    auto *sweep = app.add_subcommand("sweep", "Sweep symmetric region widths and write CSV");
    add_common(sweep, sweep_c, false);
    std::vector<double> widths_rad, widths_deg;
    auto *wr = sweep->add_option("--widths", widths_rad, "Region widths in radians")->delimiter(',');
    auto *wd = sweep->add_option("--widths-deg", widths_deg, "Region widths in degrees")->delimiter(',');
    wr->excludes(wd);

    auto *pattern = app.add_subcommand("pattern", "Solve, then dump beam patterns as CSV");
    add_common(pattern, pattern_c, false);
    double theta_min = -std::numbers::pi / 2, theta_max = std::numbers::pi / 2;
    int n_samples = 1801;
    pattern->add_option("--theta-min", theta_min, "First angle (rad)");
    pattern->add_option("--theta-max", theta_max, "Last angle (rad)");
    pattern->add_option("--samples", n_samples, "Number of angles")->check(CLI::PositiveNumber);

    auto *oracle_cmd = app.add_subcommand("oracle", "Brute-force max-min on a small instance");
    add_common(oracle_cmd, oracle_c, true);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : int(exit_config_error);
    }

    try
    {
        if (*solve)
            return run_solve(scenario_for(solve_c), solve_c.out, options_for(solve_c));
        if (*compare)
        {
            Scenario s = scenario_for(compare_c);
            s.schemes.assign(std::begin(all_schemes), std::end(all_schemes));
            return run_solve(s, compare_c.out, options_for(compare_c));
        }
        if (*sweep)
        {
            std::vector<double> widths = widths_rad;
            for (double d : widths_deg)
                widths.push_back(d * std::numbers::pi / 180.0);
            return run_sweep(scenario_for(sweep_c), widths, sweep_c.out, options_for(sweep_c));
        }
        if (*pattern)
            return run_pattern(scenario_for(pattern_c), theta_min, theta_max, n_samples, pattern_c.out,
                               options_for(pattern_c));
        if (*oracle_cmd)
            return run_oracle(oracle_c.config, oracle_c.out, options_for(oracle_c));
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_solver_failure;
    }
    return exit_ok;
}
