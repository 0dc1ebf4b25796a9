#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cks/io.hpp"
#include "support/oracles.hpp"

namespace fixture {

inline const std::vector<std::string> kAll = {"p1_halves", "p1_unit",     "p1_thirds",    "p2",
                                              "p2_halves", "p1p1_halves", "bl1p2_halves", "bl1p2_h_trapezoid"};

inline std::string path(const std::string& name) { return std::string(CKS_FIXTURE_DIR) + "/" + name + ".json"; }

inline std::shared_ptr<const cks::toric::ToricFanoModel> load(const std::string& name)
{
    return std::make_shared<const cks::toric::ToricFanoModel>(cks::io::load_model(path(name)));
}

/// Vertex data of a fixture recomputed with the oracles from the raw JSON.
inline oracle::ToricData toric_data(const std::string& name)
{
    using cks::Rat;
    using cks::RatVec;
    auto j = cks::io::parse_text(cks::io::read_file(path(name)));
    std::vector<RatVec> rays;
    for (const auto& r : j.at("rays")) rays.push_back(cks::io::ratvec_from(r, "ray"));
    const std::size_t p = rays.front().size();
    auto vertices_of = [&](const std::vector<oracle::Facet>& fs) {
        if (p == 2) return oracle::vertices_from_facets(fs);
        std::optional<Rat> lo, hi;
        for (const auto& f : fs) {
            Rat x = f.offset / f.normal[0];
            if (f.normal[0].sign() > 0) lo = lo ? std::max(*lo, x) : x;
            else hi = hi ? std::min(*hi, x) : x;
        }
        return std::vector<RatVec>{{*lo}, {*hi}};
    };
    oracle::ToricData d;
    std::vector<oracle::Facet> fs;
    for (const auto& u : rays) fs.push_back({u, Rat(-1)});
    d.anticanonical = vertices_of(fs);
    for (const auto& part : j.at("decomposition")) {
        std::vector<RatVec> pts;
        if (part.contains("vertices")) {
            for (const auto& x : part.at("vertices")) pts.push_back(cks::io::ratvec_from(x, "vertex"));
        } else {
            std::vector<oracle::Facet> hs;
            for (const auto& h : part.at("halfspaces"))
                hs.push_back({cks::io::ratvec_from(h.at("normal"), "n"), cks::io::rat_from(h.at("offset"), "c")});
            pts = vertices_of(hs);
        }
        d.summands.push_back(pts);
        d.barycenters.push_back(oracle::centroid_oracle(pts));
    }
    return d;
}

}  // namespace fixture
