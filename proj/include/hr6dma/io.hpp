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

#ifndef HR6DMA_IO_HPP
#define HR6DMA_IO_HPP

#include "hr6dma/oracle.hpp"
#include "hr6dma/scenario.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace hr6dma
{
    inline constexpr const char *artifact_version = "1.0.0";

    inline constexpr const char *pattern_csv_header = "theta_rad,scheme,gain_linear,gain_db";
    inline constexpr const char *sweep_csv_header = "width_rad,scheme,worst_gain_linear,worst_gain_db,psi_star_rad,wall_ms";

    // Widths below / above these mark the narrow and wide regimes in sweep metadata.
    inline constexpr double narrow_width_deg = 30.0;
    inline constexpr double wide_width_deg = 80.0;

    enum ExitCode
    {
        exit_ok = 0,
        exit_solver_failure = 1,
        exit_config_error = 2,
    };

    struct RunOptions
    {
        bool quiet = false;
        std::ostream *log = nullptr; // progress lines; nullptr = std::clog
    };

    // 10 log10(g), floored at -120 dB (zero gain included).
    double to_db(double linear);

    Json report_json(const SolveReport &report, const AngularGrid &grid, const ArrayConfig &cfg);
    Json solve_report_json(const Scenario &scenario, const AngularGrid &grid, const std::vector<SchemeResult> &results);

    // Writes `text` to path, or to stdout when path is empty or "-".
    void write_output(const std::filesystem::path &path, const std::string &text);

    // Runs the scenario's schemes and writes the JSON report.
    int run_solve(const Scenario &scenario, const std::filesystem::path &out, const RunOptions &opt = {});

    // One symmetric region [-w/2, w/2] per width; CSV rows plus a `<out>.meta.json` regime sidecar.
    int run_sweep(const Scenario &scenario, const std::vector<double> &widths_rad, const std::filesystem::path &out,
                  const RunOptions &opt = {});

    // Solves, then samples every scheme's beam pattern on n points of [theta_min, theta_max].
    // Writes the CSV plus `<out>.configs.json` with each scheme's rotations and beamformer.
    int run_pattern(const Scenario &scenario, double theta_min, double theta_max, int n_samples,
                    const std::filesystem::path &out, const RunOptions &opt = {});

    struct OracleJob
    {
        ArrayConfig array;
        oracle::BruteForceSpec spec;
    };

    // {"array": {...}, "region": {...}, "total_q": 7, "n_antennas": 2, "phase_grid_points": 64,
    //  "phi_grid_points": 64, "psi_grid_points": 64, "threads": 1}
    OracleJob parse_oracle_job(const std::string &text);
    int run_oracle(const std::filesystem::path &spec_path, const std::filesystem::path &out, const RunOptions &opt = {});

    std::string pattern_csv(const std::vector<SchemeResult> &results, const ArrayConfig &cfg, double theta_min,
                            double theta_max, int n_samples);
}

#endif
