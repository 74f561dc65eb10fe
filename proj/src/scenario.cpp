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

#include "hr6dma/scenario.hpp"
#include "hr6dma/errors.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace hr6dma
{
    namespace
    {
        // Reads fields of one JSON object, rejecting unknown keys and wrong types.
        class Fields
        {
        public:
            Fields(const Json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw SchemaError(path_ + ": expected an object");
            }

            template <typename T>
            void read(const char *key, T &dst)
            {
                seen_.insert(key);
                auto it = j_.find(key);
                if (it == j_.end() || it->is_null())
                    return;
                const std::string where = path_.empty() ? key : path_ + "." + key;
                if constexpr (std::is_same_v<T, bool>)
                {
                    if (!it->is_boolean())
                        throw SchemaError(where + ": expected a boolean");
                    dst = it->template get<bool>();
                }
                else if constexpr (std::is_integral_v<T>)
                {
                    if (!it->is_number_integer())
                        throw SchemaError(where + ": expected an integer");
                    if constexpr (std::is_unsigned_v<T>)
                        if (it->is_number_integer() && !it->is_number_unsigned())
                            throw SchemaError(where + ": expected a non-negative integer");
                    dst = it->template get<T>();
                }
                else
                {
                    if (!it->is_number())
                        throw SchemaError(where + ": expected a number");
                    dst = it->template get<T>();
                }
            }

            const Json *child(const char *key)
            {
                seen_.insert(key);
                auto it = j_.find(key);
                return it == j_.end() || it->is_null() ? nullptr : &*it;
            }

            std::string sub(const char *key) const { return path_.empty() ? key : path_ + "." + key; }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!seen_.count(it.key()))
                        throw SchemaError((path_.empty() ? std::string() : path_ + ".") + it.key() + ": unknown field");
            }

        private:
            const Json &j_;
            std::string path_;
            std::set<std::string> seen_;
        };

        std::string enum_text(const Json &j, const std::string &where)
        {
            if (!j.is_string())
                throw SchemaError(where + ": expected a string");
            return j.get<std::string>();
        }
    }

    void Scenario::validate() const
    {
        array.validate();
        algo.validate();
        if (total_q < region.min_samples())
            throw ConfigError("total_q: " + std::to_string(total_q) + " is below the " +
                              std::to_string(region.min_samples()) + " samples the region needs");
        if (schemes.empty())
            throw ConfigError("schemes: must not be empty");
        for (std::size_t i = 0; i < schemes.size(); ++i)
            for (std::size_t k = 0; k < i; ++k)
                if (schemes[i] == schemes[k])
                    throw ConfigError("schemes[" + std::to_string(i) + "]: duplicate " +
                                      std::string(to_string(schemes[i])));
        if (link)
            link->validate();
    }

    ArrayConfig array_from_json(const Json &j, const std::string &path)
    {
        ArrayConfig cfg;
        Fields f(j, path);
        f.read("n_antennas", cfg.n_antennas);
        f.read("spacing_wl", cfg.spacing_wl);
        f.read("psi_max", cfg.psi_max);
        f.read("phi_max", cfg.phi_max);
        f.read("directivity_p", cfg.directivity_p);
        f.read("g_max", cfg.g_max);
        f.finish();
        return cfg;
    }

    AlgoSettings algo_from_json(const Json &j, const std::string &path)
    {
        AlgoSettings a;
        Fields f(j, path);
        f.read("ao_tol", a.ao_tol);
        f.read("sca_tol", a.sca_tol);
        f.read("sdr_tol", a.sdr_tol);
        f.read("penalty_init", a.penalty_init);
        f.read("penalty_growth", a.penalty_growth);
        f.read("rank_delta", a.rank_delta);
        f.read("logdet_eps", a.logdet_eps);
        f.read("outer_grid_l", a.outer_grid_l);
        f.read("max_ao_iters", a.max_ao_iters);
        f.read("max_sca_iters", a.max_sca_iters);
        f.read("max_penalty_iters", a.max_penalty_iters);
        f.read("max_backtracks", a.max_backtracks);
        if (const Json *anchor = f.child("anchor"))
        {
            const std::string v = enum_text(*anchor, f.sub("anchor"));
            if (v == to_string(PenaltyAnchor::Relaxation))
                a.anchor = PenaltyAnchor::Relaxation;
            else if (v == to_string(PenaltyAnchor::Incumbent))
                a.anchor = PenaltyAnchor::Incumbent;
            else
                throw SchemaError(f.sub("anchor") + ": unknown value '" + v + "'");
        }
        if (const Json *penalty = f.child("penalty"))
        {
            const std::string v = enum_text(*penalty, f.sub("penalty"));
            if (v == to_string(PenaltyForm::SpectralGap))
                a.penalty = PenaltyForm::SpectralGap;
            else if (v == to_string(PenaltyForm::LogDet))
                a.penalty = PenaltyForm::LogDet;
            else
                throw SchemaError(f.sub("penalty") + ": unknown value '" + v + "'");
        }
        f.read("phase_refine", a.phase_refine);
        f.read("threads", a.threads);
        f.finish();
        return a;
    }

    CoverageRegion region_from_json(const Json &j, const std::string &path)
    {
        Fields f(j, path);
        const Json *list = f.child("intervals");
        double scale = 1.0;
        if (const Json *units = f.child("units"))
        {
            const std::string u = enum_text(*units, path + ".units");
            if (u == "deg")
                scale = std::numbers::pi / 180.0;
            else if (u != "rad")
                throw SchemaError(path + ".units: expected \"rad\" or \"deg\"");
        }
        f.finish();
        if (!list)
            return Scenario{}.region;
        if (!list->is_array())
            throw SchemaError(path + ".intervals: expected an array of [alpha, beta] pairs");
        std::vector<Interval> intervals;
        for (std::size_t m = 0; m < list->size(); ++m)
        {
            const Json &e = (*list)[m];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw SchemaError(path + ".intervals[" + std::to_string(m) + "]: expected [alpha, beta]");
            intervals.push_back({scale * e[0].get<double>(), scale * e[1].get<double>()});
        }
        return CoverageRegion(std::move(intervals));
    }

    Scenario scenario_from_json(const Json &j)
    {
        Scenario s;
        Fields f(j, "");
        if (const Json *a = f.child("array"))
            s.array = array_from_json(*a);
        if (const Json *r = f.child("region"))
            s.region = region_from_json(*r);
        f.read("total_q", s.total_q);
        if (const Json *a = f.child("algo"))
            s.algo = algo_from_json(*a);
        if (const Json *list = f.child("schemes"))
        {
            if (!list->is_array())
                throw SchemaError("schemes: expected an array of scheme names");
            s.schemes.clear();
            for (std::size_t i = 0; i < list->size(); ++i)
            {
                const std::string where = "schemes[" + std::to_string(i) + "]";
                const auto id = scheme_from_string(enum_text((*list)[i], where));
                if (!id)
                    throw SchemaError(where + ": unknown scheme '" + (*list)[i].get<std::string>() + "'");
                s.schemes.push_back(*id);
            }
        }
        if (const Json *l = f.child("link"))
        {
            LinkBudget link;
            Fields lf(*l, "link");
            lf.read("tx_power", link.tx_power);
            lf.read("ref_gain", link.ref_gain);
            lf.read("distance_m", link.distance_m);
            lf.read("pathloss_exp", link.pathloss_exp);
            lf.read("wavelength_m", link.wavelength_m);
            lf.finish();
            s.link = link;
        }
        f.read("seed", s.seed);
        f.finish();
        s.validate();
        return s;
    }

    Scenario parse_scenario(const std::string &text)
    {
        Json j;
        try
        {
            j = Json::parse(text);
        }
        catch (const Json::parse_error &e)
        {
            throw ParseError(std::string("scenario: ") + e.what());
        }
        return scenario_from_json(j);
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("scenario: cannot open " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str());
    }

    Json to_json(const ArrayConfig &cfg)
    {
        return Json{{"n_antennas", cfg.n_antennas}, {"spacing_wl", cfg.spacing_wl},
                    {"psi_max", cfg.psi_max},       {"phi_max", cfg.phi_max},
                    {"directivity_p", cfg.directivity_p}, {"g_max", cfg.g_max}};
    }

    Json to_json(const AlgoSettings &a)
    {
        return Json{{"ao_tol", a.ao_tol},
                    {"sca_tol", a.sca_tol},
                    {"sdr_tol", a.sdr_tol},
                    {"penalty_init", a.penalty_init},
                    {"penalty_growth", a.penalty_growth},
                    {"rank_delta", a.rank_delta},
                    {"logdet_eps", a.logdet_eps},
                    {"outer_grid_l", a.outer_grid_l},
                    {"max_ao_iters", a.max_ao_iters},
                    {"max_sca_iters", a.max_sca_iters},
                    {"max_penalty_iters", a.max_penalty_iters},
                    {"max_backtracks", a.max_backtracks},
                    {"anchor", std::string(to_string(a.anchor))},
                    {"penalty", std::string(to_string(a.penalty))},
                    {"phase_refine", a.phase_refine},
                    {"threads", a.threads}};
    }

    Json to_json(const CoverageRegion &region)
    {
        Json list = Json::array();
        for (const Interval &iv : region.intervals())
            list.push_back(Json::array({iv.alpha, iv.beta}));
        return Json{{"intervals", list}};
    }

    Json to_json(const LinkBudget &l)
    {
        return Json{{"tx_power", l.tx_power},
                    {"ref_gain", l.ref_gain},
                    {"distance_m", l.distance_m},
                    {"pathloss_exp", l.pathloss_exp},
                    {"wavelength_m", l.wavelength_m}};
    }

    Json to_json(const Scenario &s)
    {
        Json schemes = Json::array();
        for (SchemeId id : s.schemes)
            schemes.push_back(std::string(to_string(id)));
        Json j{{"array", to_json(s.array)},
               {"region", to_json(s.region)},
               {"total_q", s.total_q},
               {"algo", to_json(s.algo)},
               {"schemes", schemes}};
        if (s.link)
            j["link"] = to_json(*s.link);
        j["seed"] = s.seed;
        return j;
    }
}
