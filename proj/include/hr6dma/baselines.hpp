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

#ifndef HR6DMA_BASELINES_HPP
#define HR6DMA_BASELINES_HPP

#include "hr6dma/optimizer.hpp"

#include <iterator>
#include <optional>
#include <string_view>
#include <vector>

namespace hr6dma
{
    enum class SchemeId
    {
        HR6DMA,
        AntennaRA,
        ArrayRA,
        NRA,
        ARS,
        CSAR,
    };

    inline constexpr SchemeId all_schemes[] = {SchemeId::HR6DMA, SchemeId::AntennaRA, SchemeId::ArrayRA,
                                               SchemeId::NRA,    SchemeId::ARS,       SchemeId::CSAR};

    std::string_view to_string(SchemeId id);
    // Case-sensitive inverse of to_string.
    std::optional<SchemeId> scheme_from_string(std::string_view name);

    // No rotation at all: psi = 0, phi = 0, beamformer only.
    SolveReport solve_nra(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                          const AlgoSettings &settings);

    // Array rotation grid search with phi = 0.
    SolveReport solve_array_ra(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                               const AlgoSettings &settings);

    // Per-antenna rotation with psi = 0.
    SolveReport solve_antenna_ra(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                                 const AlgoSettings &settings);

    // Coordinate search over phi on a 1 degree lattice, beamformer refreshed after each sweep.
    SolveReport solve_ars(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                          const AlgoSettings &settings);

    // Every boresight on the region center, beamformer only, psi grid search.
    SolveReport solve_csar(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                           const AlgoSettings &settings);

    // Full hierarchical rotation (solve_outer).
    SolveReport solve_hr6dma(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                             const AlgoSettings &settings);

    SolveReport solve_scheme(SchemeId id, const CoverageRegion &region, const AngularGrid &grid,
                             const ArrayConfig &cfg, const AlgoSettings &settings);

    struct SchemeResult
    {
        SchemeId id;
        SolveReport report;
    };

    // The requested schemes on one grid, reported in all_schemes order. Freer schemes are re-seeded
    // from restricted ones that beat them, so HR6DMA >= every other scheme and AntennaRA, ArrayRA >= NRA
    // whenever both sides of a pair were requested.
    std::vector<SchemeResult> compare_all(const CoverageRegion &region, const AngularGrid &grid,
                                          const ArrayConfig &cfg, const AlgoSettings &settings,
                                          const std::vector<SchemeId> &schemes = {std::begin(all_schemes),
                                                                                  std::end(all_schemes)});

    // Fixed rotations, beamformer step from the matched steering start; keeps the better of the two.
    InnerSolution solve_fixed_rotation(const CoverageRegion &region, const AngularGrid &grid, double psi,
                                       const Eigen::VectorXd &phi, const ArrayConfig &cfg,
                                       const AlgoSettings &settings);

    // Lattice used by the ARS coordinate search: [-phi_max, phi_max] at ~1 degree, both ends included.
    std::vector<double> ars_lattice(double phi_max);
}

#endif
