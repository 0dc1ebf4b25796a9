#pragma once

// Command dispatch for the cks tool. Kept in a header so tests can run commands in-process.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cks/io.hpp"
#include "cks/stability.hpp"

namespace cks::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitSuite = 2;

#ifndef CKS_DEFAULT_FIXTURES
#define CKS_DEFAULT_FIXTURES "fixtures"
#endif

inline std::string fixture_dir()
{
    if (const char* env = std::getenv("CKS_FIXTURES"); env && *env) return env;
    return CKS_DEFAULT_FIXTURES;
}

/// A path as given, else a fixture name ("p2" or "p2.json") in the fixture directory.
inline std::string resolve_model(const std::string& path)
{
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    for (const auto& cand : {fs::path(fixture_dir()) / path, fs::path(fixture_dir()) / (path + ".json")})
        if (fs::exists(cand)) return cand.string();
    throw Error(ErrorCode::IoError, "no such model file: " + path);
}

struct Options {
    std::string verb;
    std::string model;
    std::string format = "json";
    std::string out;
    std::optional<std::string> xi, subtorus, slope, eta, level, scale, generators, family;
    long long mmax = 0;
    long long degree = 1;
    std::uint64_t seed = 0;
    std::size_t samples = 100;
};

/// Command echo without the output path, so records of identical runs are identical.
inline std::vector<std::string> echo(const Options& o)
{
    std::vector<std::string> c{o.verb, o.model};
    auto opt = [&](const char* name, const std::optional<std::string>& v) {
        if (v) {
            c.push_back(name);
            c.push_back(*v);
        }
    };
    opt("--xi", o.xi);
    opt("--subtorus", o.subtorus);
    opt("--slope", o.slope);
    opt("--eta", o.eta);
    opt("--level", o.level);
    opt("--scale", o.scale);
    opt("--generators", o.generators);
    opt("--family", o.family);
    if (o.verb == "lct" && o.generators) c.insert(c.end(), {"--degree", std::to_string(o.degree)});
    if (o.mmax) c.insert(c.end(), {"--mmax", std::to_string(o.mmax)});
    if (o.verb == "verify") c.insert(c.end(), {"--seed", std::to_string(o.seed), "--samples", std::to_string(o.samples)});
    c.insert(c.end(), {"--format", o.format});
    return c;
}

namespace detail {

using stab::Provenance;
using stab::Quantity;

inline RatVec need_vec(const std::optional<std::string>& v, const char* flag, std::size_t p)
{
    if (!v) throw Error(ErrorCode::ValidationError, std::string(flag) + " is required");
    auto r = io::ratvec_from_text(*v);
    if (r.size() != p)
        throw Error(ErrorCode::RankMismatch, std::string(flag) + " has " + std::to_string(r.size()) +
                                                 " entries for a rank " + std::to_string(p) + " model");
    return r;
}

inline std::vector<RatVec> subtorus_of(const Options& o, std::size_t p)
{
    if (!o.subtorus) return stab::full_lattice(p);
    auto s = io::vectors_from_text(*o.subtorus);
    for (const auto& v : s)
        if (v.size() != p) throw Error(ErrorCode::RankMismatch, "--subtorus vector of wrong rank");
    return s;
}

inline void put_futaki(stab::StabilityReport& r, const toric::ToricFanoModel& m)
{
    auto f = stab::coupled_futaki(m);
    r.values["barycenters"] = {f.per_summand, Provenance::ClosedForm};
    r.values["total"] = {f.total, Provenance::ClosedForm};
    r.verdicts["futaki_vanishes"] = f.vanishes;
    r.assume(stab::kLebesgueAssumption);
}

struct Outcome {
    json report;
    int code = kExitOk;
};

inline Outcome compute(const Options& o, const stab::ModelPtr& mp)
{
    const auto& m = *mp;
    const std::size_t p = m.rank();
    stab::StabilityReport r;
    r.model = m.name();
    r.command = o.verb;
    std::optional<stab::SuiteReport> suite;

    if (o.verb == "futaki") {
        put_futaki(r, m);
    } else if (o.verb == "jnorm") {
        auto xi = need_vec(o.xi, "--xi", p);
        Rat sum;
        for (std::size_t i = 0; i < m.summands(); ++i) {
            Rat j = stab::j_twist(m, i, xi);
            sum += j;
            r.values["j." + std::to_string(i)] = {j, Provenance::ClosedForm};
        }
        r.values["j.total"] = {stab::j_twist(m, toric::kTotal, xi), Provenance::ClosedForm};
        r.values["j.coupled"] = {sum, Provenance::ClosedForm};
        r.assume(stab::kLebesgueAssumption);
    } else if (o.verb == "reduced-jnorm") {
        auto xi = need_vec(o.xi, "--xi", p);
        auto res = stab::reduced_coupled_j(m, xi, subtorus_of(o, p));
        r.values["reduced_j"] = {res.value, Provenance::Certified};
        r.witnesses["argmin"] = res.argmin;
        r.assume(stab::kLebesgueAssumption);
    } else if (o.verb == "delta") {
        auto v = stab::semistable_verdict(m);
        auto d = stab::coupled_delta(m);
        r.values["delta"] = {v.delta, Provenance::Certified};
        r.values["optimal_rays"] = {d.optimal_rays, Provenance::Certified};
        r.witnesses["delta"] = v.witness;
        r.verdicts["semistable"] = v.semistable;
        r.verdicts["dichotomy"] = v.dichotomy_holds;
        put_futaki(r, m);
        for (const auto& a : d.assumptions) r.assume(a);
    } else if (o.verb == "reduced-delta") {
        auto res = stab::reduced_coupled_delta(m, subtorus_of(o, p));
        if (res.infinite) r.values["reduced_delta"] = {stab::Infinity{}, Provenance::ClosedForm};
        else if (res.value) r.values["reduced_delta"] = {*res.value, Provenance::Certified};
        r.values["lower_bound"] = {res.lower_bound, Provenance::Certified};
        if (res.witness) r.witnesses["eta"] = *res.witness;
        if (res.twist) r.witnesses["xi"] = *res.twist;
        r.verdicts["exact"] = res.exact;
        r.verdicts["attained"] = res.attained;
        for (const auto& a : res.assumptions) r.assume(a);
    } else if (o.verb == "ding") {
        Rat delta = o.slope ? Rat::parse(*o.slope) : Rat(1);
        std::vector<filt::ValuationShift> members;
        if (o.family) {
            auto bases = filt::make_bases(mp, o.mmax ? o.mmax : 12);
            members = stab::descriptors(io::family_from(io::parse_text(io::read_file(*o.family), *o.family), bases));
        } else {
            auto eta = need_vec(o.eta, "--eta", p);
            members.assign(m.summands(), filt::ValuationShift{eta, Rat(0)});
        }
        auto d = stab::coupled_ding(m, members, delta);
        r.values["ding"] = {d.value, Provenance::ClosedForm};
        r.values["mu"] = {d.mu, Provenance::ClosedForm};
        r.values["s_sum"] = {d.s_sum, Provenance::ClosedForm};
        if (o.xi) {
            auto xi = need_vec(o.xi, "--xi", p);
            r.values["ding_twisted"] = {stab::coupled_ding(m, stab::twisted(m, members, xi), delta).value,
                                        Provenance::ClosedForm};
            if (delta == Rat(1)) {
                auto t = stab::ding_of_twist(m, members, xi);
                r.values["ding_twist_formula"] = {t.formula, Provenance::ClosedForm};
                r.verdicts["twist_identity"] = t.agree;
            }
        }
        r.assume(stab::kLebesgueAssumption);
    } else if (o.verb == "lct") {
        Rat c = o.scale ? Rat::parse(*o.scale) : Rat(1);
        toric::MonomialIdeal ideal;
        if (o.generators) {
            auto g = io::vectors_from_text(*o.generators);
            ideal = toric::MonomialIdeal::from_generators(m, o.degree, g);
        } else {
            auto eta = need_vec(o.eta, "--eta", p);
            if (!o.level) throw Error(ErrorCode::ValidationError, "--level is required with --eta");
            ideal = toric::MonomialIdeal::valuation_ideal(m, eta, Rat::parse(*o.level));
        }
        auto l = toric::monomial_lct(m, ideal, c);
        if (l.value) {
            r.values["lct"] = {*l.value, Provenance::Certified};
            r.witnesses["lct"] = l.witness;
        } else {
            r.values["lct"] = {stab::Infinity{}, Provenance::ClosedForm};
        }
        for (const auto& a : l.assumptions) r.assume(a);
    } else if (o.verb == "destabilize") {
        auto d = stab::find_destabilizer(mp, o.mmax ? o.mmax : 12);
        r.verdicts["found"] = d.has_value();
        r.values["delta"] = {stab::coupled_delta(m).value, Provenance::Certified};
        if (d) {
            r.witnesses["eta"] = d->eta;
            r.values["ding"] = {d->ding, Provenance::ClosedForm};
        }
        r.assume(stab::kToricSearchAssumption);
        r.assume(stab::kLebesgueAssumption);
    } else if (o.verb == "verify") {
        stab::SuiteOptions so;
        so.samples = o.samples;
        so.table_samples = o.samples;
        so.seed = o.seed;
        so.m_max = o.mmax ? o.mmax : 6;
        suite = stab::identity_suite(mp, so);
        r.verdicts["passed"] = suite->ok();
        r.assume(stab::kLebesgueAssumption);
    } else {
        throw Error(ErrorCode::ValidationError, "unknown verb " + o.verb);
    }

    Outcome out;
    out.report = io::to_json(r);
    if (suite) {
        out.report["suite"] = io::to_json(*suite);
        if (!suite->ok()) out.code = kExitSuite;
    }
    return out;
}

}  // namespace detail

inline std::string render(const json& report, const std::string& format)
{
    return format == "table" ? io::render_table(report) : io::canonical(report);
}

/// Runs one invocation; returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Coupled K-stability invariants of toric log Fano models", "cks"};
    app.require_subcommand(1);
    Options o;
    std::string show_path;

    auto common = [&](CLI::App* sub, bool model = true) {
        if (model) sub->add_option("model", o.model, "model JSON path or fixture name")->required();
        sub->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
        sub->add_option("--out", o.out, "write a run record to this path");
    };
    auto* futaki = app.add_subcommand("futaki", "coupled Futaki character (barycenters)");
    common(futaki);
    auto* jnorm = app.add_subcommand("jnorm", "J-norm of the xi-twisted trivial filtration");
    common(jnorm);
    jnorm->add_option("--xi", o.xi, "twist a/b,c/d");
    auto* rj = app.add_subcommand("reduced-jnorm", "reduced coupled J of the xi-twisted trivial family");
    common(rj);
    rj->add_option("--xi", o.xi, "base twist");
    rj->add_option("--subtorus", o.subtorus, "generators v1;v2 (default: full torus)");
    auto* delta = app.add_subcommand("delta", "coupled stability threshold");
    common(delta);
    auto* rd = app.add_subcommand("reduced-delta", "reduced coupled stability threshold");
    common(rd);
    rd->add_option("--subtorus", o.subtorus, "generators v1;v2 (default: full torus, empty: trivial)");
    auto* ding = app.add_subcommand("ding", "coupled Ding invariant of a valuation family");
    common(ding);
    ding->add_option("--eta", o.eta, "common valuation direction");
    ding->add_option("--family", o.family, "family JSON file");
    ding->add_option("--slope", o.slope, "slope delta (default 1)");
    ding->add_option("--xi", o.xi, "probe twist");
    ding->add_option("--mmax", o.mmax, "degree cap for family tables");
    auto* lct = app.add_subcommand("lct", "log canonical threshold of a monomial ideal");
    common(lct);
    lct->add_option("--eta", o.eta, "valuation ideal direction");
    lct->add_option("--level", o.level, "valuation ideal level t");
    lct->add_option("--generators", o.generators, "generator characters a,b;c,d");
    lct->add_option("--degree", o.degree, "degree of the generators")->check(CLI::PositiveNumber);
    lct->add_option("--scale", o.scale, "exponent c (default 1)");
    auto* destab = app.add_subcommand("destabilize", "destabilizing valuation family");
    common(destab);
    destab->add_option("--mmax", o.mmax, "degree cap")->check(CLI::PositiveNumber);
    auto* verify = app.add_subcommand("verify", "exact identity suite");
    common(verify);
    verify->add_option("--seed", o.seed, "sampling seed");
    verify->add_option("--samples", o.samples, "samples per identity")->check(CLI::PositiveNumber);
    verify->add_option("--mmax", o.mmax, "degree cap for table identities")->check(CLI::PositiveNumber);
    auto* show = app.add_subcommand("show", "re-render a saved report");
    show->add_option("report", show_path, "report or run record JSON")->required();
    show->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    show->add_option("--out", o.out, "unused");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }
    o.verb = app.get_subcommands().front()->get_name();

    try {
        if (o.verb == "show") {
            auto j = io::parse_text(io::read_file(show_path), show_path);
            if (j.contains("report")) j = j.at("report");
            out << render(j, o.format);
            return kExitOk;
        }
        const std::string path = resolve_model(o.model);
        const std::string text = io::read_file(path);
        std::string hashed = text;
        if (o.family) hashed += io::read_file(*o.family);
        const std::string before = io::hash_text(hashed);

        stab::ModelPtr model;
        try {
            model = std::make_shared<const toric::ToricFanoModel>(io::model_from(io::parse_text(text, path)));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::IoError) throw;
            throw Error(ErrorCode::ValidationError, e.what());
        }
        auto res = detail::compute(o, model);
        if (res.report["model"].get<std::string>().empty())
            res.report["model"] = std::filesystem::path(path).stem().string();
        if (!io::float_free(res.report)) throw Error(ErrorCode::Internal, "floating-point value in report");

        std::string after = io::read_file(path);
        if (o.family) after += io::read_file(*o.family);
        if (io::hash_text(after) != before) throw Error(ErrorCode::IoError, "input changed during the run");

        if (!o.out.empty()) {
            io::RunRecord rec{echo(o), before, res.report, res.report["assumptions"].get<std::vector<std::string>>()};
            io::emit_report(rec, o.out);
        }
        out << render(res.report, o.format);
        return res.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::SuiteFailure ? kExitSuite : kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace cks::cli
