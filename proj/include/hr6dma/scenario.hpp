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

#ifndef HR6DMA_SCENARIO_HPP
#define HR6DMA_SCENARIO_HPP

#include "hr6dma/baselines.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hr6dma
{
    using Json = nlohmann::ordered_json;

    struct Scenario
    {
        ArrayConfig array;
        CoverageRegion region = CoverageRegion::single(-0.1, 0.1);
        int total_q = 1000;
        AlgoSettings algo;
        std::vector<SchemeId> schemes{std::begin(all_schemes), std::end(all_schemes)};
        std::optional<LinkBudget> link;
        std::uint64_t seed = 0; // for randomized tests; solves ignore it

        // Throws ConfigError naming the offending field.
        void validate() const;
        AngularGrid grid() const { return sample_region(region, total_q); }
        bool operator==(const Scenario &) const = default;
    };

    // ParseError for invalid JSON, SchemaError for type or field-name problems,
    // ConfigError for invariant violations. Omitted fields take their defaults.
    Scenario scenario_from_json(const Json &j);
    Scenario parse_scenario(const std::string &text);
    Scenario load_scenario(const std::filesystem::path &path);

    Json to_json(const Scenario &s);
    Json to_json(const ArrayConfig &cfg);
    Json to_json(const AlgoSettings &algo);
    Json to_json(const CoverageRegion &region);
    Json to_json(const LinkBudget &link);

    ArrayConfig array_from_json(const Json &j, const std::string &path = "array");
    AlgoSettings algo_from_json(const Json &j, const std::string &path = "algo");
    CoverageRegion region_from_json(const Json &j, const std::string &path = "region");
}

#endif
