#pragma once

// JSON interchange. Rationals travel as strings "p/q" or "n"; no floating point is ever emitted.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cks/filtalg.hpp"
#include "cks/stability.hpp"
#include "cks/toricmodel.hpp"

namespace cks::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "cks 1.0.0";

// ---------------------------------------------------------------------------
// Reading.

inline json parse_text(const std::string& text, const std::string& origin = "input")
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, origin + " at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Rat rat_from(const json& j, const std::string& what)
{
    if (j.is_string()) return Rat::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    throw Error(ErrorCode::ParseError, what + ": expected a rational string, got " + j.dump());
}

inline RatVec ratvec_from(const json& j, const std::string& what)
{
    if (!j.is_array()) throw Error(ErrorCode::ParseError, what + ": expected an array");
    RatVec v;
    for (const auto& x : j) v.push_back(rat_from(x, what));
    return v;
}

/// "a/b,c/d" -> vector.
inline RatVec ratvec_from_text(const std::string& text)
{
    RatVec v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
        v.push_back(Rat::parse(tok));
    }
    if (v.empty()) throw Error(ErrorCode::ParseError, "empty vector '" + text + "'");
    return v;
}

/// "v1;v2" with integer vectors; empty text is the empty list.
inline std::vector<RatVec> vectors_from_text(const std::string& text)
{
    std::vector<RatVec> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(ratvec_from_text(tok));
    }
    return out;
}

inline geom::ExactPolytope polytope_from(const json& j)
{
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "polytope must be an object");
    if (j.contains("vertices")) {
        std::vector<RatVec> pts;
        for (const auto& v : j.at("vertices")) pts.push_back(ratvec_from(v, "vertex"));
        if (pts.empty()) throw Error(ErrorCode::EmptyRegion, "no vertices");
        for (const auto& v : pts) require_same_rank(v, pts.front(), "vertex list");
        return geom::from_vertices(std::move(pts));
    }
    if (j.contains("halfspaces")) {
        std::vector<geom::HalfSpace> hs;
        for (const auto& h : j.at("halfspaces")) {
            RatVec n = ratvec_from(h.at("normal"), "normal");
            if (!is_integral(n) || is_zero(n)) throw Error(ErrorCode::ParseError, "normals must be nonzero integer vectors");
            hs.push_back(geom::normalized(n, rat_from(h.at("offset"), "offset")));
        }
        if (hs.empty()) throw Error(ErrorCode::UnboundedRegion, "no half-spaces");
        return geom::from_halfspaces(hs);
    }
    throw Error(ErrorCode::ParseError, "polytope needs \"vertices\" or \"halfspaces\"");
}

inline toric::ToricFanoModel model_from(const json& j)
{
    try {
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "model must be an object");
        std::vector<RatVec> rays;
        for (const auto& r : j.at("rays")) rays.push_back(ratvec_from(r, "ray"));
        if (j.contains("rank")) {
            auto p = j.at("rank").get<long long>();
            for (const auto& r : rays)
                if (static_cast<long long>(r.size()) != p) throw Error(ErrorCode::RankMismatch, "ray rank differs from \"rank\"");
        }
        std::vector<geom::ExactPolytope> parts;
        for (const auto& d : j.at("decomposition")) parts.push_back(polytope_from(d));
        return toric::build_model(std::move(rays), std::move(parts), j.value("name", std::string()));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("model: ") + e.what());
    }
}

inline toric::ToricFanoModel load_model(const std::string& path)
{
    return model_from(parse_text(read_file(path), path));
}

/// Character keys "1,0" or "[1,0]".
inline RatVec character_from_key(std::string key)
{
    key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return c == '[' || c == ']'; }), key.end());
    auto v = ratvec_from_text(key);
    if (!is_integral(v)) throw Error(ErrorCode::ParseError, "characters are integer vectors");
    return v;
}

inline filt::Filtration filtration_from(const json& j, const filt::BasisPtr& basis)
{
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "trivial") {
            auto f = filt::trivial(basis);
            return j.contains("shift") ? filt::shift(f, rat_from(j.at("shift"), "shift")) : f;
        }
        if (kind == "toric_valuation") {
            auto f = filt::toric_valuation(basis, ratvec_from(j.at("eta"), "eta"));
            return j.contains("shift") ? filt::shift(f, rat_from(j.at("shift"), "shift")) : f;
        }
        if (kind == "table") {
            filt::WeightTable t;
            for (const auto& [deg, row] : j.at("degrees").items()) {
                long long m = std::stoll(deg);
                for (const auto& [key, w] : row.items()) {
                    if (w.is_string() && (w.get<std::string>() == "inf" || w.get<std::string>() == "+inf" ||
                                          w.get<std::string>() == "-inf"))
                        throw Error(ErrorCode::UnboundedWeights, "infinite weight at degree " + deg);
                    t[m][character_from_key(key)] = rat_from(w, "weight");
                }
            }
            return filt::from_table(basis, t);
        }
        throw Error(ErrorCode::ParseError, "unknown filtration kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("filtration: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::ParseError, "filtration: degree keys must be integers");
    }
}

inline filt::FiltrationFamily family_from(const json& j, const filt::BasisSet& bases)
{
    if (!j.contains("filtrations") || !j.at("filtrations").is_array())
        throw Error(ErrorCode::ParseError, "family needs a \"filtrations\" array");
    const auto& arr = j.at("filtrations");
    if (arr.size() != bases.summands.size())
        throw Error(ErrorCode::GridMismatch, "family has " + std::to_string(arr.size()) + " members for " +
                                                 std::to_string(bases.summands.size()) + " summands");
    filt::FiltrationFamily fam;
    for (std::size_t i = 0; i < arr.size(); ++i) fam.members.push_back(filtration_from(arr[i], bases.summands[i]));
    return fam;
}

// ---------------------------------------------------------------------------
// Writing.

inline json to_json(const Rat& r) { return r.str(); }

inline json to_json(const RatVec& v)
{
    json a = json::array();
    for (const auto& x : v) a.push_back(x.str());
    return a;
}

inline json to_json(const std::vector<RatVec>& vs)
{
    json a = json::array();
    for (const auto& v : vs) a.push_back(to_json(v));
    return a;
}

inline json to_json(const geom::ExactPolytope& p)
{
    json hs = json::array();
    for (const auto& h : p.halfspaces()) hs.push_back({{"normal", to_json(h.normal)}, {"offset", h.offset.str()}});
    return {{"vertices", to_json(p.vertices())}, {"halfspaces", hs}};
}

inline json to_json(const toric::ToricFanoModel& m)
{
    json d = json::array();
    for (const auto& p : m.decomposition()) d.push_back({{"vertices", to_json(p.vertices())}});
    return {{"name", m.name()}, {"rank", m.rank()}, {"rays", to_json(m.rays())}, {"decomposition", d}};
}

inline json to_json(const stab::Quantity& q)
{
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, stab::Infinity>) return "+inf";
            else return to_json(v);
        },
        q.value);
}

inline json to_json(const stab::SuiteReport& s)
{
    json ids = json::array();
    for (const auto& i : s.identities) {
        json o{{"name", i.name}, {"checks", i.checks}, {"failures", i.failures}, {"skipped", i.skipped}};
        if (!i.first_failure.empty()) o["first_failure"] = i.first_failure;
        if (!i.note.empty()) o["note"] = i.note;
        ids.push_back(o);
    }
    return {{"passed", s.passed()}, {"failed", s.failed()}, {"identities", ids}};
}

inline json to_json(const stab::StabilityReport& r)
{
    json values = json::object(), prov = json::object(), verdicts = json::object(), wit = json::object();
    for (const auto& [k, q] : r.values) {
        values[k] = to_json(q);
        prov[k] = stab::provenance_name(q.provenance);
    }
    for (const auto& [k, v] : r.verdicts) verdicts[k] = v;
    for (const auto& [k, v] : r.witnesses) wit[k] = to_json(v);
    json out{{"model", r.model},   {"command", r.command},    {"assumptions", r.assumptions},
             {"values", values},   {"provenance", prov},      {"verdicts", verdicts},
             {"witnesses", wit}};
    if (!r.notes.empty()) out["notes"] = r.notes;
    return out;
}

/// Canonical text: object keys sorted (nlohmann's default map), two-space indent, trailing newline.
inline std::string canonical(const json& j) { return j.dump(2) + "\n"; }

/// True when no floating-point number appears anywhere in the document.
inline bool float_free(const json& j)
{
    if (j.is_number_float()) return false;
    if (j.is_structured())
        for (const auto& x : j)
            if (!float_free(x)) return false;
    return true;
}

inline std::uint64_t fnv1a(const std::string& data)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_text(const std::string& data)
{
    std::ostringstream ss;
    ss << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(data);
    return ss.str();
}

struct RunRecord {
    std::vector<std::string> command;
    std::string input_hash;
    json report;
    std::vector<std::string> assumptions;
};

inline json to_json(const RunRecord& r)
{
    return {{"command", r.command},
            {"input_hash", r.input_hash},
            {"report", r.report},
            {"tool_version", kToolVersion},
            {"assumptions", r.assumptions}};
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline void emit_report(const RunRecord& r, const std::string& path)
{
    auto j = to_json(r);
    if (!float_free(j)) throw Error(ErrorCode::Internal, "floating-point value in report");
    write_file(path, canonical(j));
}

// ---------------------------------------------------------------------------
// Human table, rendered from the JSON report so that saved reports re-render identically.

namespace detail {

inline std::string scalar_text(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_array()) {
        std::string s = "(";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += scalar_text(v[i]);
        }
        return s + ")";
    }
    return v.dump();
}

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
        return;
    }
    if (j.is_array() && !j.empty() && j.front().is_object()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
        return;
    }
    rows.emplace_back(prefix, scalar_text(j));
}

}  // namespace detail

inline std::string render_table(const json& report)
{
    std::vector<std::pair<std::string, std::string>> rows;
    detail::flatten(report, "", rows);
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    std::ostringstream out;
    for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << "\n";
    return out.str();
}

}  // namespace cks::io
