#pragma once

// JSON form of wavelet coefficients: {J, j_max, a: [[k, v]], d: [[j, k, v]]}.

#include <cstdint>
#include <map>

#include "json.hpp"
#include "lpvar/error.hpp"
#include "lpvar/wavelets.hpp"

namespace lpvar {

inline nlohmann::json coefficients_to_json(const WaveletCoefficients& c)
{
    nlohmann::json a = nlohmann::json::array();
    for (std::size_t i = 0; i < c.scaling.values.size(); ++i)
        a.push_back({c.scaling.first + static_cast<std::int64_t>(i), c.scaling.values[i]});
    nlohmann::json d = nlohmann::json::array();
    for (const auto& l : c.details)
        for (std::size_t i = 0; i < l.values.size(); ++i)
            d.push_back({l.level, l.first + static_cast<std::int64_t>(i), l.values[i]});
    return {{"J", c.base_level}, {"j_max", c.top_level}, {"a", a}, {"d", d}};
}

namespace detail {

/// Dense level from sparse (k, v) entries; missing translates are zero.
inline LevelCoefficients dense_level(int level, const std::map<std::int64_t, double>& entries)
{
    LevelCoefficients out{level, 0, {}};
    if (entries.empty())
        return out;
    out.first = entries.begin()->first;
    out.values.assign(static_cast<std::size_t>(entries.rbegin()->first - out.first + 1), 0.0);
    for (const auto& [k, v] : entries)
        out.values[static_cast<std::size_t>(k - out.first)] = v;
    return out;
}

}  // namespace detail

inline WaveletCoefficients coefficients_from_json(const nlohmann::json& doc)
{
    try {
        WaveletCoefficients c;
        c.base_level = doc.at("J").get<int>();
        c.top_level = doc.at("j_max").get<int>();
        if (c.base_level > c.top_level)
            throw ConfigError("coefficient document has J > j_max");
        std::map<std::int64_t, double> a;
        for (const auto& e : doc.at("a"))
            a[e.at(0).get<std::int64_t>()] = e.at(1).get<double>();
        std::map<int, std::map<std::int64_t, double>> d;
        for (const auto& e : doc.at("d")) {
            const int j = e.at(0).get<int>();
            if (j < c.base_level || j > c.top_level)
                throw ConfigError("detail level " + std::to_string(j) + " outside [J, j_max]");
            d[j][e.at(1).get<std::int64_t>()] = e.at(2).get<double>();
        }
        c.scaling = detail::dense_level(c.base_level, a);
        for (int j = c.base_level; j <= c.top_level; ++j)
            c.details.push_back(detail::dense_level(j, d[j]));
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed coefficient document: ") + e.what());
    }
}

}  // namespace lpvar
