// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------
//
// Command-line front end. Every output starts with a '#' header echoing the
// fully resolved configuration; stripping the leading "# " from the lines after
// the "resolved config" marker yields a config file that reproduces the body.

#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "relaydmt.hpp"

namespace relaydmt::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numeric = 3;

inline constexpr int schema_version = 1;

using Section = std::map<std::string, std::string>;
using Config = std::map<std::string, Section>;

inline const Config& defaults()
{
    static const Config d{
        {"common",
         {{"seed", "1"}, {"workers", "1"}, {"var_sd", "1"}, {"var_sr1", "1"}, {"var_sr2", "1"},
          {"var_r1d", "1"}, {"var_r2d", "1"}}},
        {"tradeoff",
         {{"schemes", "all"}, {"k", "1,2"}, {"r_step", "1/100"}, {"t0_bw", "5/2"},
          {"pairs", "MIX_AF:DDF,MIX_AF:NAF,STC_SYNC:TDA_INDEP"}}},
        {"simulate",
         {{"scheme", "STC_SYNC"}, {"r", "0.25"}, {"snr_db", "0:15:5"}, {"trials", "100000"}, {"mode", "mc"},
          {"cond", "overall"}, {"measure", "joint"}, {"fit_db", ""}, {"waveform", "orthogonal"},
          {"waveform_file", ""}, {"rolloff", "0.5"}, {"span", "2"}, {"samples_per_symbol", "64"},
          {"tau", "0.5"}, {"t0_bw", "3"}, {"quad_points", "512"}, {"omega_points", "1024"}}},
        {"waveform",
         {{"waveform", "rect"}, {"waveform_file", ""}, {"rolloff", "0.5"}, {"span", "2"},
          {"samples_per_symbol", "64"}, {"tau", "0.5"}, {"omega_points", "1024"}, {"refine", "16"}}},
        {"toeplitz",
         {{"waveform", "srrc"}, {"waveform_file", ""}, {"rolloff", "0.5"}, {"span", "2"},
          {"samples_per_symbol", "64"}, {"tau", "0.3"}, {"n_list", "8,32,128,512"}, {"snr_db", "10"},
          {"realizations", "20"}, {"cap", "4096"}, {"quad_points", "2048"}}},
        {"compare-capacity",
         {{"waveform", "half_sine"}, {"waveform_file", ""}, {"rolloff", "0.5"}, {"span", "1"},
          {"samples_per_symbol", "64"}, {"tau", "0.5"}, {"snr_db", "0:30:10"}, {"draws", "100"},
          {"omega_points", "1024"}, {"quad_points", "512"}}},
    };
    return d;
}

// ---- value parsing ----------------------------------------------------------

inline std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(trim(item));
    return out;
}

inline double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d))
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline std::int64_t parse_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument(v);
        const unsigned long long i = std::stoull(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected an unsigned integer, got '" + v + "'");
    }
}

/// "p/q", an integer, or a terminating decimal.
inline Rational parse_rational(const std::string& key, const std::string& v)
{
    const auto slash = v.find('/');
    if (slash != std::string::npos) {
        const auto num = parse_int(key, trim(v.substr(0, slash)));
        const auto den = parse_int(key, trim(v.substr(slash + 1)));
        if (den == 0)
            throw config_error("key '" + key + "': zero denominator");
        return Rational(num, den);
    }
    const auto dot = v.find('.');
    if (dot == std::string::npos)
        return Rational(parse_int(key, v));
    const std::string digits = v.substr(0, dot) + v.substr(dot + 1);
    const std::size_t places = v.size() - dot - 1;
    if (places > 12)
        throw config_error("key '" + key + "': too many decimal places");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < places; ++i)
        den *= 10;
    return Rational(parse_int(key, digits.empty() ? "0" : digits), den);
}

/// "LO:HI:STEP" in dB, inclusive of HI when it lies on the grid.
inline std::vector<double> parse_grid(const std::string& key, const std::string& v)
{
    const auto parts = split(v, ':');
    if (parts.size() == 1)
        return {parse_double(key, parts[0])};
    if (parts.size() != 3)
        throw config_error("key '" + key + "': expected LO:HI:STEP");
    const double lo = parse_double(key, parts[0]);
    const double hi = parse_double(key, parts[1]);
    const double step = parse_double(key, parts[2]);
    if (!(step > 0.0) || hi < lo)
        throw config_error("key '" + key + "': need STEP > 0 and HI >= LO");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 100000)
        throw config_error("key '" + key + "': grid too large");
    std::vector<double> g;
    for (long i = 0; i <= n; ++i)
        g.push_back(lo + i * step);
    return g;
}

inline std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& v)
{
    std::vector<std::int64_t> out;
    for (const auto& item : split(v, ','))
        out.push_back(parse_int(key, item));
    if (out.empty())
        throw config_error("key '" + key + "': empty list");
    return out;
}

// ---- config handling -------------------------------------------------------

inline void check_key(const std::string& section, const std::string& key)
{
    const auto& d = defaults();
    const auto s = d.find(section);
    if (s == d.end())
        throw config_error("unknown config section [" + section + "]");
    if (!s->second.count(key))
        throw config_error("unknown key '" + key + "' in section [" + section + "]");
}

inline void merge_file(Config& cfg, const std::string& path)
{
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(path, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error("cannot read config " + path + ": " + e.message());
    }
    for (const auto& [name, node] : pt) {
        if (node.empty() && !node.data().empty())
            throw config_error("key '" + name + "' outside a [section]");
        if (!defaults().count(name))
            throw config_error("unknown config section [" + name + "]");
        for (const auto& [key, value] : node) {
            check_key(name, key);
            cfg[name][key] = trim(value.data());
        }
    }
}

inline void write_header(std::ostream& os, const std::string& command, const Config& cfg,
                         const std::vector<std::string>& notes = {})
{
    os << "# relaydmt " << command << "\n";
    os << "# schema=relaydmt." << command << ".v" << schema_version << "\n";
    for (const auto& n : notes)
        os << "# note: " << n << "\n";
    os << "# resolved config (strip leading '# ' to reuse):\n";
    for (const char* sec : {"common", command.c_str()}) {
        os << "# [" << sec << "]\n";
        for (const auto& [k, v] : cfg.at(sec))
            os << "# " << k << "=" << v << "\n";
    }
}

inline std::string num(double v) { return fmt::format("{}", v); }

struct Common {
    std::uint64_t seed = 1;
    int workers = 1;
    NetworkConfig net;
};

inline Common parse_common(const Section& s)
{
    Common c;
    c.seed = parse_u64("seed", s.at("seed"));
    const auto w = parse_int("workers", s.at("workers"));
    if (w < 1 || w > 256)
        throw config_error("workers must lie in [1, 256]");
    c.workers = static_cast<int>(w);
    const char* keys[link_count] = {"var_sd", "var_sr1", "var_sr2", "var_r1d", "var_r2d"};
    for (int i = 0; i < link_count; ++i)
        c.net.variance[i] = parse_double(keys[i], s.at(keys[i]));
    c.net.validate();
    return c;
}

/// Waveform (if any) and its correlation set for a section with waveform keys.
struct WaveformChoice {
    std::optional<Waveform> wf;
    CorrelationSet corr;
    std::string label;
};

inline WaveformChoice parse_waveform(const Section& s)
{
    WaveformChoice w;
    w.label = s.at("waveform");
    const int sps = static_cast<int>(parse_int("samples_per_symbol", s.at("samples_per_symbol")));
    const double tau = parse_double("tau", s.at("tau"));
    if (w.label == "rect")
        w.wf = rectangular(sps);
    else if (w.label == "half_sine")
        w.wf = half_sine(sps);
    else if (w.label == "srrc")
        w.wf = truncated_srrc(parse_double("rolloff", s.at("rolloff")),
                              static_cast<int>(parse_int("span", s.at("span"))), sps);
    else if (w.label == "file") {
        if (s.at("waveform_file").empty())
            throw config_error("waveform=file needs waveform_file");
        w.wf = read_waveform(s.at("waveform_file"));
    } else if (w.label == "orthogonal") {
        w.corr = CorrelationSet::orthogonal(1);
        return w;
    } else {
        throw config_error("waveform must be rect, half_sine, srrc, file or orthogonal");
    }
    if (!(tau > 0.0) || tau > w.wf->symbol_period)
        throw config_error("tau must lie in (0, Ts]");
    w.corr = correlations(*w.wf, tau);
    return w;
}

/// Run `job(i)` for i in [0, n) on `workers` threads; each index written by exactly one job.
template <class Job>
void parallel_for(std::size_t n, int workers, Job&& job)
{
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i)
            job(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < w; ++k)
        pool.emplace_back([&, k] {
            for (std::size_t i = n * k / w; i < n * (k + 1) / w; ++i)
                job(i);
        });
    for (auto& t : pool)
        t.join();
}

// ---- commands ------------------------------------------------------------

struct Output {
    std::string body;                      // main file
    std::optional<std::string> crossings;  // tradeoff side file
};

inline Output cmd_tradeoff(const Config& cfg)
{
    const Section& s = cfg.at("tradeoff");
    std::vector<TradeoffScheme> schemes;
    const std::string list = s.at("schemes");
    if (list == "all") {
        schemes = all_tradeoff_schemes();
    } else {
        for (const auto& name : split(list, ','))
            if (!name.empty())
                schemes.push_back(parse_tradeoff_scheme(name));
    }
    if (schemes.empty())
        throw config_error("scheme list is empty");
    std::vector<int> ks;
    for (auto k : parse_int_list("k", s.at("k"))) {
        if (k != 1 && k != 2)
            throw config_error("k must be 1 or 2");
        ks.push_back(static_cast<int>(k));
    }
    const Rational step = parse_rational("r_step", s.at("r_step"));
    if (step <= Rational(0))
        throw config_error("r_step must be positive");
    const Rational t0bw = parse_rational("t0_bw", s.at("t0_bw"));
    if (t0bw < Rational(0))
        throw config_error("t0_bw must be nonnegative");
    const Rational delta1 = delta1_of(t0bw);
    std::vector<std::pair<TradeoffScheme, TradeoffScheme>> pairs;
    if (!s.at("pairs").empty()) {
        for (const auto& p : split(s.at("pairs"), ',')) {
            const auto ab = split(p, ':');
            if (ab.size() != 2)
                throw config_error("pairs entries must look like A:B");
            pairs.emplace_back(parse_tradeoff_scheme(ab[0]), parse_tradeoff_scheme(ab[1]));
        }
    }

    auto defined = [](TradeoffScheme sc, int k) {
        if (sc == TradeoffScheme::DF)
            return k == 1;
        if (sc == TradeoffScheme::TDA_REPETITION)
            return k == 2;
        return true;
    };

    std::vector<std::string> notes{"Delta1=" + to_string(delta1)};
    std::ostringstream body;
    std::ostringstream rows;
    rows << "scheme,K,r,d_low,d_high\n";
    for (int k : ks) {
        for (TradeoffScheme sc : schemes) {
            if (!defined(sc, k)) {
                notes.push_back(std::string(tradeoff_name(sc)) + " has no curve for K=" + std::to_string(k));
                continue;
            }
            const TradeoffCurves c = tradeoff_curves(sc, k, delta1);
            for (const auto& p : sample_curve(c, step))
                rows << tradeoff_name(sc) << "," << k << "," << num(p.r) << "," << num(p.d_low) << ","
                     << num(p.d_high) << "\n";
        }
    }
    write_header(body, "tradeoff", cfg, notes);
    body << rows.str();

    std::ostringstream cx;
    write_header(cx, "tradeoff", cfg, {"crossings of the upper curves"});
    cx << "K,scheme_a,scheme_b,kind,r,r_exact,r_end\n";
    for (int k : ks) {
        for (const auto& [a, b] : pairs) {
            if (!defined(a, k) || !defined(b, k))
                continue;
            for (const auto& c : crossings(tradeoff_curves(a, k, delta1), tradeoff_curves(b, k, delta1))) {
                cx << k << "," << tradeoff_name(a) << "," << tradeoff_name(b) << "," << c.kind << ","
                   << num(c.value) << "," << (c.exact ? to_string(c.r) : std::string("inexact")) << ","
                   << (c.kind == "coincident" ? to_string(c.r_end) : std::string()) << "\n";
            }
        }
    }
    return {body.str(), cx.str()};
}

inline Output cmd_simulate(const Config& cfg)
{
    const Common common = parse_common(cfg.at("common"));
    const Section& s = cfg.at("simulate");
    const Scheme scheme = parse_scheme(s.at("scheme"));
    const double r = parse_double("r", s.at("r"));
    if (!(r >= 0.0 && r < 0.5))
        throw config_error("r must lie in [0, 1/2)");
    const std::vector<double> grid = parse_grid("snr_db", s.at("snr_db"));
    const std::uint64_t trials = parse_u64("trials", s.at("trials"));
    const std::string mode = s.at("mode");
    if (mode != "mc" && mode != "analytic")
        throw config_error("mode must be mc or analytic");
    const ConditionalCase cond = parse_case(s.at("cond"));
    const std::string mname = s.at("measure");
    if (mname != "joint" && mname != "conditional")
        throw config_error("measure must be joint or conditional");
    const Measure measure = mname == "joint" ? Measure::Joint : Measure::Conditional;
    double fit_lo = grid.front(), fit_hi = grid.back();
    if (!s.at("fit_db").empty()) {
        const auto parts = split(s.at("fit_db"), ':');
        if (parts.size() != 2)
            throw config_error("fit_db must look like LO:HI");
        fit_lo = parse_double("fit_db", parts[0]);
        fit_hi = parse_double("fit_db", parts[1]);
    }
    const double t0_bw = parse_double("t0_bw", s.at("t0_bw"));
    if (t0_bw < 0.0)
        throw config_error("t0_bw must be nonnegative");
    const int quad_points = static_cast<int>(parse_int("quad_points", s.at("quad_points")));
    if (quad_points < 512)
        throw config_error("quad_points must be >= 512");
    const int omega_points = static_cast<int>(parse_int("omega_points", s.at("omega_points")));
    if (omega_points < 256)
        throw config_error("omega_points must be >= 256");
    if (mode == "mc" && trials < 10000)
        throw config_error("trials must be >= 10000");

    SchemeContext ctx;
    ctx.net = common.net;
    ctx.delays = DelayConfig::from_product(t0_bw);
    ctx.quad_points = quad_points;
    std::vector<std::string> notes;
    const bool needs_waveform =
        scheme == Scheme::ASTC || scheme == Scheme::TDA_LINMOD || scheme == Scheme::MIX_AF;
    if (needs_waveform && mode == "mc") {
        const WaveformChoice w = parse_waveform(s);
        ctx.corr = w.corr;
        ctx.eig = certify_pd(w.corr, omega_points);
        if (!ctx.eig.pd)
            notes.push_back("waveform not certified positive definite");
        if (scheme == Scheme::TDA_LINMOD && w.corr.span != 1)
            throw config_error("TDA_LINMOD needs a single-symbol waveform");
    }

    OutageCurve curve;
    if (mode == "mc") {
        McSpec spec;
        spec.scheme = scheme;
        spec.r = r;
        spec.snr_db = grid;
        spec.trials = trials;
        spec.seed = common.seed;
        spec.cond = cond;
        spec.measure = measure;
        spec.ctx = ctx;
        spec.workers = common.workers;
        curve = mc_outage(spec);
    } else {
        const NetworkConfig net = common.net;
        switch (scheme) {
        case Scheme::STC_SYNC:
            curve = analytic_curve(scheme, r, grid, cond, measure,
                                   [&](double snr) { return analytic_outage_stc(snr, r, net, cond); });
            break;
        case Scheme::ASTC:
            notes.push_back("analytic ASTC uses mutually orthogonal shifts (three parallel paths)");
            curve = analytic_curve(scheme, r, grid, cond, measure,
                                   [&](double snr) { return analytic_outage_astc_parallel(snr, r, net, cond); });
            break;
        case Scheme::TDA_INDEP:
        case Scheme::TDA_REPETITION:
            curve = analytic_curve(scheme, r, grid, cond, measure, [&](double snr) {
                return analytic_outage_tda(scheme, snr, r, net, ctx.delays, cond);
            });
            break;
        default:
            throw config_error("analytic mode supports STC_SYNC, ASTC, TDA_INDEP and TDA_REPETITION");
        }
    }
    const FitResult fit = slope_fit(curve, fit_lo, fit_hi);

    std::ostringstream os;
    notes.push_back(std::string("cond=") + case_name(cond) + " measure=" + mname);
    write_header(os, "simulate", cfg, notes);
    os << "scheme,r,snr_db,outage,ci_low,ci_high,trials,censored\n";
    for (const auto& p : curve.points)
        os << scheme_name(scheme) << "," << num(r) << "," << num(p.snr_db) << "," << num(p.outage) << ","
           << num(p.ci_low) << "," << num(p.ci_high) << "," << p.trials << "," << (p.censored ? 1 : 0) << "\n";
    if (fit.ok)
        os << "# fit status=ok slope=" << num(fit.slope) << " stderr=" << num(fit.stderr_slope)
           << " lo_db=" << num(fit.lo_db) << " hi_db=" << num(fit.hi_db) << " used=" << fit.used << "\n";
    else
        os << "# fit status=refused reason=" << fit.reason << " lo_db=" << num(fit.lo_db)
           << " hi_db=" << num(fit.hi_db) << "\n";
    return {os.str(), std::nullopt};
}

inline Output cmd_waveform(const Config& cfg)
{
    const Section& s = cfg.at("waveform");
    const WaveformChoice w = parse_waveform(s);
    const int omega_points = static_cast<int>(parse_int("omega_points", s.at("omega_points")));
    const auto refine = parse_int("refine", s.at("refine"));
    if (omega_points < 256)
        throw config_error("omega_points must be >= 256");
    if (refine < 1 || refine > 1024)
        throw config_error("refine must lie in [1, 1024]");
    const double tau = parse_double("tau", s.at("tau"));
    EigenBounds b = w.wf ? certify_pd(*w.wf, tau, omega_points) : certify_pd(w.corr, omega_points);
    EigenBounds fine = certify_pd(w.corr, omega_points * static_cast<int>(refine));

    std::vector<std::string> notes;
    if (!b.pd)
        notes.push_back("not positive definite: minimum eigenvalue near omega=" + num(b.omega_at_min));
    if (!b.energy_ok)
        notes.push_back("waveform fails the unit-energy check");
    std::ostringstream os;
    write_header(os, "waveform", cfg, notes);
    os << "metric,value\n";
    auto row = [&](const char* k, double v) { os << k << "," << num(v) << "\n"; };
    row("pd", b.pd ? 1 : 0);
    row("lambda_min", b.lambda_min);
    row("lambda_max", b.lambda_max);
    row("omega_at_min", b.omega_at_min);
    row("omega_at_max", b.omega_at_max);
    row("certified_min", b.certified_min);
    row("certified_max", b.certified_max);
    row("lipschitz", b.lipschitz);
    row("max_bound", b.max_bound);
    row("max_bound_ok", b.max_bound_ok ? 1 : 0);
    row("trace_deviation", b.trace_deviation);
    row("energy_error", b.energy_error);
    row("energy_ok", b.energy_ok ? 1 : 0);
    row("lambda_min_refined", fine.lambda_min);
    row("refine_shift", std::abs(fine.lambda_min - b.lambda_min));
    row("a1", w.corr.a1);
    row("c0", w.corr.c0);
    row("c1", w.corr.c1);
    row("c2", w.corr.c2);
    row("f1", w.corr.f1);
    row("rho12", w.corr.rho12);
    row("rho21", w.corr.rho21);
    return {os.str(), std::nullopt};
}

inline Output cmd_toeplitz(const Config& cfg)
{
    const Common common = parse_common(cfg.at("common"));
    const Section& s = cfg.at("toeplitz");
    const WaveformChoice w = parse_waveform(s);
    std::vector<int> n_list;
    for (auto n : parse_int_list("n_list", s.at("n_list")))
        n_list.push_back(static_cast<int>(n));
    const auto cap = parse_int("cap", s.at("cap"));
    if (cap < 1)
        throw config_error("cap must be >= 1");
    for (int n : n_list)
        if (n < 1 || n > cap)
            throw config_error("block count " + std::to_string(n) + " outside [1, cap=" + std::to_string(cap) + "]");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw config_error("n_list must be strictly ascending");
    const double snr_db = parse_double("snr_db", s.at("snr_db"));
    const auto realizations = parse_int("realizations", s.at("realizations"));
    if (realizations < 1)
        throw config_error("realizations must be >= 1");
    const int quad_points = static_cast<int>(parse_int("quad_points", s.at("quad_points")));
    if (quad_points < 512)
        throw config_error("quad_points must be >= 512");
    const double rho0 = common.net.power_factor() * db_to_linear(snr_db);

    std::vector<ConvergenceStudy> results(realizations);
    parallel_for(results.size(), common.workers, [&](std::size_t i) {
        CounterRng rng(common.seed, i);
        const FadingRealization f = sample_fading(rng, common.net);
        results[i] = convergence_study(w.corr, f.r1d, f.r2d, n_list, rho0, quad_points, 0.01, static_cast<int>(cap));
    });

    int converged = 0, worst_inv = 0;
    double worst = 0.0;
    for (const auto& r : results) {
        converged += r.converged;
        worst_inv = std::max(worst_inv, r.inversions);
        worst = std::max(worst, r.points.back().rel_err);
    }
    std::ostringstream os;
    write_header(os, "toeplitz", cfg);
    os << "realization,n,mi,mi_inf,abs_err,rel_err\n";
    for (std::size_t i = 0; i < results.size(); ++i)
        for (const auto& p : results[i].points)
            os << i << "," << p.n << "," << num(p.mi) << "," << num(results[i].mi_inf) << "," << num(p.abs_err)
               << "," << num(p.rel_err) << "\n";
    os << "# summary realizations=" << results.size() << " converged=" << converged
       << " max_rel_err=" << num(worst) << " max_inversions=" << worst_inv << "\n";
    return {os.str(), std::nullopt};
}

inline Output cmd_compare_capacity(const Config& cfg)
{
    const Common common = parse_common(cfg.at("common"));
    const Section& s = cfg.at("compare-capacity");
    const WaveformChoice w = parse_waveform(s);
    const std::vector<double> grid = parse_grid("snr_db", s.at("snr_db"));
    const auto draws = parse_int("draws", s.at("draws"));
    if (draws < 1)
        throw config_error("draws must be >= 1");
    const int omega_points = static_cast<int>(parse_int("omega_points", s.at("omega_points")));
    if (omega_points < 256)
        throw config_error("omega_points must be >= 256");
    const int quad_points = static_cast<int>(parse_int("quad_points", s.at("quad_points")));
    if (quad_points < 512)
        throw config_error("quad_points must be >= 512");
    const EigenBounds eig = certify_pd(w.corr, omega_points);

    std::vector<std::vector<double>> margin(grid.size(), std::vector<double>(draws));
    parallel_for(static_cast<std::size_t>(draws), common.workers, [&](std::size_t i) {
        CounterRng rng(common.seed, i);
        const FadingRealization f = sample_fading(rng, common.net);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double rho0 = common.net.power_factor() * db_to_linear(grid[g]);
            const double async = i_emaca_spectral(f, w.corr, eig, rho0, quad_points).value;
            const double sync = std::log2(1.0 + rho0 * (std::norm(f.r1d) + std::norm(f.r2d)));
            margin[g][i] = async - sync;
        }
    });

    std::vector<std::string> notes;
    if (!eig.pd)
        notes.push_back("warning: waveform not certified positive definite; strict dominance is not expected");
    std::ostringstream os;
    write_header(os, "compare-capacity", cfg, notes);
    os << "snr_db,draws,win_rate,min_margin,mean_margin\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        int wins = 0;
        double mn = std::numeric_limits<double>::infinity(), sum = 0.0;
        for (double m : margin[g]) {
            wins += m > 0.0;
            mn = std::min(mn, m);
            sum += m;
        }
        os << num(grid[g]) << "," << draws << "," << num(static_cast<double>(wins) / draws) << "," << num(mn) << ","
           << num(sum / draws) << "\n";
    }
    return {os.str(), std::nullopt};
}

// ---- entry point -----------------------------------------------------------

struct Flags {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> snr_db, scheme;
    std::optional<std::uint64_t> trials;
    std::optional<double> r;
};

inline void add_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "key=value config file with [sections]");
    sub->add_option("--out", f.out, "output CSV path (stdout when omitted)");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--workers", f.workers, "worker threads (does not change results)");
    sub->add_option("--snr-db", f.snr_db, "SNR grid LO:HI:STEP in dB");
    sub->add_option("--trials", f.trials, "Monte Carlo trials / fading draws");
    sub->add_option("--r", f.r, "multiplexing gain");
    sub->add_option("--scheme", f.scheme, "scheme name (comma list for tradeoff)");
}

inline void apply_flags(Config& cfg, const std::string& cmd, const Flags& f)
{
    auto put = [&](const std::string& flag, const std::string& key, const std::string& value) {
        if (!cfg.at(cmd).count(key))
            throw config_error("flag " + flag + " does not apply to " + cmd);
        cfg[cmd][key] = value;
    };
    if (f.seed)
        cfg["common"]["seed"] = std::to_string(*f.seed);
    if (f.workers)
        cfg["common"]["workers"] = std::to_string(*f.workers);
    if (f.snr_db)
        put("--snr-db", "snr_db", *f.snr_db);
    if (f.trials)
        put("--trials", cmd == "compare-capacity" ? "draws" : "trials", std::to_string(*f.trials));
    if (f.r)
        put("--r", "r", num(*f.r));
    if (f.scheme)
        put("--scheme", cmd == "tradeoff" ? "schemes" : "scheme", *f.scheme);
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw config_error("cannot open output file " + path);
    out << text;
    if (!out)
        throw numeric_error("failed writing " + path);
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"relaydmt: outage, mutual information and DM tradeoff of two-relay cooperative diversity"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;
    for (const char* name : {"tradeoff", "simulate", "waveform", "toeplitz", "compare-capacity"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_flags(sub, flags);
        sub->callback([&chosen, name] { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_config;
    }

    try {
        Config cfg = defaults();
        if (!flags.config.empty())
            merge_file(cfg, flags.config);
        apply_flags(cfg, chosen, flags);
        Output result;
        if (chosen == "tradeoff")
            result = cmd_tradeoff(cfg);
        else if (chosen == "simulate")
            result = cmd_simulate(cfg);
        else if (chosen == "waveform")
            result = cmd_waveform(cfg);
        else if (chosen == "toeplitz")
            result = cmd_toeplitz(cfg);
        else
            result = cmd_compare_capacity(cfg);

        if (flags.out.empty()) {
            out << result.body;
            if (result.crossings)
                out << "\n" << *result.crossings;
        } else {
            write_text(flags.out, result.body);
            if (result.crossings)
                write_text(flags.out + ".crossings.csv", *result.crossings);
        }
        return exit_ok;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const domain_error& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const numeric_error& e) {
        err << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    }
}

} // namespace relaydmt::cli
