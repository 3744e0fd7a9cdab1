#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dspectra/fourier.hpp"
#include "dspectra/martingale.hpp"
#include "dspectra/measure.hpp"
#include "dspectra/spec_io.hpp"
#include "dspectra/testfn.hpp"
#include "dspectra/walsh.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;
using namespace dspectra;

namespace {

constexpr const char* kVersion = "dspectra 1.0.0";

json ledger_json(const Ledger& ledger) {
    json out = json::array();
    for (const auto& e : ledger.entries)
        out.push_back({{"name", e.name},
                       {"lhs", e.lhs},
                       {"rhs", e.rhs},
                       {"relation", e.relation},
                       {"pass", e.pass}});
    return out;
}

struct RunResult {
    int exit_code = 0;
    json report;
    std::string csv;  // used instead of the JSON payload when --format csv fits
};

void emit(const RunResult& r, const std::string& out_path, const std::string& format) {
    std::string text = (format == "csv" && !r.csv.empty()) ? r.csv : r.report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_atomic(out_path, text);
}

json base_report(const std::string& command, const json& params) {
    return {{"command", command}, {"version", kVersion}, {"params", params}};
}

int finish(RunResult& r, const Ledger& ledger) {
    r.report["ledger"] = ledger_json(ledger);
    r.report["pass"] = ledger.all_pass();
    r.exit_code = ledger.all_pass() ? 0 : 1;
    return r.exit_code;
}

json intervals_json(const std::vector<std::pair<Rational, Rational>>& v) {
    json out = json::array();
    for (const auto& [a, b] : v) out.push_back({rational_to_string(a), rational_to_string(b)});
    return out;
}

RunResult run_argv(const std::vector<std::string>& args);

RunResult run_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open manifest: " + path);
    json m = json::parse(in);
    RunResult r;
    r.report = base_report("manifest", {{"file", path}});
    json runs = json::array();
    bool all_ok = true;
    std::set<std::string> names;
    for (const auto& entry : m.at("runs")) {
        std::string name = entry.at("name").get<std::string>();
        if (!names.insert(name).second) throw std::invalid_argument("duplicate run name: " + name);
        std::vector<std::string> argv{entry.at("subcommand").get<std::string>()};
        for (const auto& [k, v] : entry.at("params").items()) {
            argv.push_back("--" + k);
            argv.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
        if (entry.contains("format")) {
            argv.push_back("--format");
            argv.push_back(entry.at("format").get<std::string>());
        }
        if (entry.contains("out")) {
            argv.push_back("--out");
            argv.push_back(entry.at("out").get<std::string>());
        }
        RunResult sub;
        try {
            sub = run_argv(argv);
            if (entry.contains("out"))
                emit(sub, entry.at("out").get<std::string>(),
                     entry.value("format", std::string("json")));
        } catch (const std::exception& ex) {
            sub.exit_code = 2;
            sub.report = {{"error", ex.what()}};
        }
        runs.push_back({{"name", name}, {"exit_code", sub.exit_code},
                        {"pass", sub.exit_code == 0}});
        all_ok = all_ok && sub.exit_code == 0;
    }
    r.report["runs"] = runs;
    r.report["pass"] = all_ok;
    r.exit_code = all_ok ? 0 : 1;
    return r;
}

RunResult run_argv(const std::vector<std::string>& args) {
    CLI::App app{"Dyadic-measure spectra toolkit"};
    app.require_subcommand(1);

    std::string measure_arg, nu1_arg, nu2_arg, out_path, format = "json", manifest_path, level_set_arg;
    double a_param = 0.04, b_param = 1e4;
    std::string beta_s = "1/2", alpha_s = "-3/4", rho_s = "3/4", eta_s = "1/100", lambda_s = "1/2";
    std::string tau_s = "1/100";
    int k_param = 0, n_param = 8, kmax = 7, mmax = 4, nmax = 12;
    long long N = 4096;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--out", out_path);
        c->add_option("--seed", seed);
    };

    auto* c_measure = app.add_subcommand("measure", "materialize a measure spec");
    c_measure->add_option("--measure", measure_arg)->required();
    add_common(c_measure);

    auto* c_tree = app.add_subcommand("tree", "martingale tree level summaries");
    c_tree->add_option("--measure", measure_arg)->required();
    add_common(c_tree);

    auto* c_mr = app.add_subcommand("mountain-river", "find a calm level");
    c_mr->add_option("--measure", measure_arg)->required();
    c_mr->add_option("--beta", beta_s);
    c_mr->add_option("--alpha", alpha_s);
    c_mr->add_option("--rho", rho_s);
    c_mr->add_option("--k", k_param)->required();
    add_common(c_mr);

    auto* c_cover = app.add_subcommand("cover", "low-dimension cover of nu1 avoiding nu2 margin mass");
    c_cover->add_option("--nu1", nu1_arg)->required();
    c_cover->add_option("--nu2", nu2_arg)->required();
    c_cover->add_option("--beta", beta_s);
    c_cover->add_option("--tau", tau_s);
    add_common(c_cover);

    auto* c_cbeta = app.add_subcommand("cbeta", "finite-scale c_beta");
    c_cbeta->add_option("--measure", measure_arg)->required();
    c_cbeta->add_option("--beta", beta_s);
    c_cbeta->add_option("--k", k_param)->required();
    add_common(c_cbeta);

    auto* c_prop2 = app.add_subcommand("prop2", "convolution witness lower bound");
    c_prop2->add_option("--measure", measure_arg)->required();
    c_prop2->add_option("--beta", beta_s);
    c_prop2->add_option("--alpha", alpha_s);
    c_prop2->add_option("--rho", rho_s);
    c_prop2->add_option("--eta", eta_s);
    add_common(c_prop2);

    auto* c_band = app.add_subcommand("band", "frequency-band energies of h_n");
    c_band->add_option("--n", n_param);
    c_band->add_option("--a", a_param);
    c_band->add_option("--b", b_param);
    std::string band_eps_s;  // default: 2^{-n-4}
    c_band->add_option("--eps", band_eps_s);
    add_common(c_band);

    auto* c_riesz = app.add_subcommand("riesz", "exact Riesz-product coefficients");
    c_riesz->add_option("--kmax", kmax);
    c_riesz->add_option("--level-set", level_set_arg);
    add_common(c_riesz);

    auto* c_spec = app.add_subcommand("spectrum", "Fourier-Stieltjes table");
    c_spec->add_option("--measure", measure_arg)->required();
    c_spec->add_option("--N", N);
    add_common(c_spec);

    auto* c_decay = app.add_subcommand("decay", "convolution-power spectral decay");
    c_decay->add_option("--measure", measure_arg)->required();
    c_decay->add_option("--mmax", mmax);
    c_decay->add_option("--N", N);
    c_decay->add_option("--beta", beta_s);
    c_decay->add_option("--alpha", alpha_s);
    c_decay->add_option("--rho", rho_s);
    c_decay->add_option("--eta", eta_s);
    add_common(c_decay);

    auto* c_walsh = app.add_subcommand("walsh", "grouped Walsh/Haar statistics");
    c_walsh->add_option("--measure", measure_arg)->required();
    c_walsh->add_option("--nmax", nmax);
    c_walsh->add_option("--lambda", lambda_s);
    c_walsh->add_option("--beta", beta_s);
    add_common(c_walsh);

    auto* c_manifest = app.add_subcommand("manifest", "run a batch of named experiments");
    c_manifest->add_option("--file", manifest_path)->required();
    add_common(c_manifest);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);

    RunResult r;
    Ledger ledger;

    if (c_measure->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        r.report = base_report("measure", {{"measure", measure_arg}});
        r.report["result"] = measure_to_json(mu);
        r.csv = measure_to_csv(mu);
        r.report["pass"] = true;
        return r;
    }
    if (c_tree->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        MartingaleTree tree = build_tree(mu);
        json levels = json::array();
        for (int n = 0; n <= tree.depth; ++n) {
            Rational mass(0);
            for (const auto& [c, m] : tree.levels[static_cast<std::size_t>(n)]) mass += rational_abs(m);
            levels.push_back({{"level", n},
                              {"nonzero_cells", tree.levels[static_cast<std::size_t>(n)].size()},
                              {"abs_mass", rational_to_string(mass)}});
        }
        r.report = base_report("tree", {{"measure", measure_arg}});
        r.report["result"] = {{"depth", tree.depth}, {"levels", levels}};
        r.report["pass"] = true;
        return r;
    }
    if (c_mr->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        Rational beta = rational_from_string(beta_s), alpha = rational_from_string(alpha_s),
                 rho = rational_from_string(rho_s);
        MountainRiverResult res = mountain_river_search(mu, beta, alpha, rho, k_param);
        json levels = json::array();
        for (const auto& v : res.turbulent_mass_by_level) levels.push_back(rational_to_string(v));
        r.report = base_report("mountain-river",
                               {{"measure", measure_arg}, {"beta", beta_s}, {"alpha", alpha_s},
                                {"rho", rho_s}, {"k", k_param}});
        r.report["result"] = {{"found", res.found},
                              {"n", res.n},
                              {"r", res.r},
                              {"theta", rational_to_string(res.theta_used)},
                              {"rho_prime", rational_to_string(res.rho_prime)},
                              {"turbulent_mass", rational_to_string(res.turbulent_mass)},
                              {"turbulent_mass_by_level", levels},
                              {"failure", res.failure}};
        ledger.check("calm_level_found", res.found ? 1 : 0, "==", 1);
        finish(r, ledger);
        return r;
    }
    if (c_cover->parsed()) {
        DyadicMeasure nu1 = measure_from_arg(nu1_arg), nu2 = measure_from_arg(nu2_arg);
        Rational beta = rational_from_string(beta_s), tau = rational_from_string(tau_s);
        CoverResult res = select_cover(nu1, nu2, beta, tau);
        r.report = base_report("cover", {{"nu1", nu1_arg}, {"nu2", nu2_arg}, {"beta", beta_s},
                                         {"tau", tau_s}});
        if (res.family) {
            const auto& f = *res.family;
            r.report["result"] = {{"k", f.k},
                                  {"cells", f.cells},
                                  {"delta", rational_to_string(f.delta)},
                                  {"nu1_mass", rational_to_string(f.nu1_mass)},
                                  {"nu2_margin_mass", rational_to_string(f.nu2_margin_mass)}};
        } else {
            json binding = json::array();
            for (const auto& [k, why] : res.failure.binding) binding.push_back({{"k", k}, {"why", why}});
            r.report["result"] = {{"binding", binding}};
        }
        ledger.check("cover_found", res.family ? 1 : 0, "==", 1);
        finish(r, ledger);
        return r;
    }
    if (c_cbeta->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        Rational beta = rational_from_string(beta_s);
        Rational v = c_beta_estimate(mu, beta, k_param);
        r.report = base_report("cbeta", {{"measure", measure_arg}, {"beta", beta_s}, {"k", k_param}});
        r.report["result"] = {{"c_beta", rational_to_string(v)}, {"c_beta_numeric", to_double(v)}};
        r.report["pass"] = true;
        return r;
    }
    if (c_prop2->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        Prop2Report rep = prop2_pipeline(mu, rational_from_string(beta_s), rational_from_string(alpha_s),
                                         rational_from_string(rho_s), rational_from_string(eta_s));
        r.report = base_report("prop2", {{"measure", measure_arg}, {"beta", beta_s},
                                         {"alpha", alpha_s}, {"rho", rho_s}, {"eta", eta_s}});
        bool vacuous = !rep.ok && rep.ledger.all_pass();
        r.report["result"] = {{"ok", rep.ok},
                              {"vacuous_bound", vacuous},
                              {"failed_stage", rep.failed_stage},
                              {"negated", rep.negated},
                              {"k", rep.k},
                              {"n", rep.n},
                              {"eps", rational_to_string(rep.eps)},
                              {"orientation_reflected", rep.orientation_reflected},
                              {"e_set", intervals_json(rep.e_set)},
                              {"c_beta", rational_to_string(rep.c_beta)},
                              {"achieved", rational_to_string(rep.achieved)},
                              {"bound", rep.bound}};
        r.report["ledger"] = ledger_json(rep.ledger);
        bool pass = rep.ok || vacuous;
        r.report["pass"] = pass;
        r.exit_code = pass ? 0 : 1;
        return r;
    }
    if (c_band->parsed()) {
        Rational band_eps =
            band_eps_s.empty() ? pow2(-n_param - 4) : rational_from_string(band_eps_s);
        TestFunctionHn h = make_hn(n_param, band_eps);
        BandEnergies e = band_tail_energies(h, a_param, b_param);
        BandSupportCheck s = band_support_check(h, a_param, b_param, 512, 64, seed);
        r.report = base_report("band", {{"n", n_param}, {"a", a_param}, {"b", b_param},
                                        {"eps", rational_to_string(band_eps)}});
        r.report["result"] = {{"low", e.low},
                              {"high_interval", {e.high_lo, e.high_hi}},
                              {"low_cut", e.low_cut},
                              {"high_cut", e.high_cut},
                              {"support", {{"j_lo", s.j_lo}, {"j_hi", s.j_hi},
                                           {"no_negative_frequencies", s.no_negative_frequencies},
                                           {"out_of_band_zero", s.out_of_band_zero},
                                           {"in_band_matches", s.in_band_matches}}}};
        ledger.check("low_band_energy", e.low, "<", 8 * M_PI * M_PI * a_param * a_param * a_param);
        ledger.check("high_band_energy", e.high_hi, "<", 18.0 / b_param);
        ledger.check("no_negative_frequencies", s.no_negative_frequencies ? 1 : 0, "==", 1);
        ledger.check("out_of_band_zero", s.out_of_band_zero ? 1 : 0, "==", 1);
        ledger.check("in_band_matches", s.in_band_matches ? 1 : 0, "==", 1);
        finish(r, ledger);
        return r;
    }
    if (c_riesz->parsed()) {
        RieszTable t = riesz_exact_coeffs(kmax);
        r.report = base_report("riesz", {{"kmax", kmax}});
        json range = json::array();
        for (const auto& rv : range_closure_report(t))
            range.push_back({{"value", rational_to_string(rv.value)}, {"multiplicity", rv.multiplicity}});
        json result = {{"window", t.window}, {"nonzero_count", t.coeffs.size()}, {"range", range}};
        if (!level_set_arg.empty()) {
            Rational q = level_set_arg.find('/') != std::string::npos
                             ? rational_from_string(level_set_arg)
                             : Rational(level_set_arg == "0.25" ? Rational(1, 4)
                                                                : Rational(BigInt(level_set_arg)));
            result["level_set"] = level_set(t, q);
        }
        r.report["result"] = result;
        std::ostringstream csv;
        csv << "frequency,numerator,denominator\n";
        for (const auto& [f, c] : t.coeffs) csv << f << "," << num(c).str() << "," << den(c).str() << "\n";
        r.csv = csv.str();
        r.report["pass"] = true;
        return r;
    }
    if (c_spec->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        SpectrumTable t = fourier_stieltjes(mu, N);
        r.report = base_report("spectrum", {{"measure", measure_arg}, {"N", N}});
        std::ostringstream csv;
        csv << "j,re,im\n";
        json vals = json::array();
        for (long long n = -N; n <= N; ++n) {
            auto v = t.at(n);
            csv << n << "," << v.real() << "," << v.imag() << "\n";
            vals.push_back({n, v.real(), v.imag()});
        }
        r.csv = csv.str();
        r.report["result"] = {{"N", N}, {"values", vals}};
        r.report["pass"] = true;
        return r;
    }
    if (c_decay->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        DecayReport rep = spectral_decay_experiment(mu, mmax, N, rational_from_string(beta_s),
                                                    rational_from_string(alpha_s),
                                                    rational_from_string(rho_s),
                                                    rational_from_string(eta_s));
        r.report = base_report("decay", {{"measure", measure_arg}, {"mmax", mmax}, {"N", N}});
        json rows = json::array();
        for (const auto& row : rep.rows)
            rows.push_back({{"m", row.m},
                            {"sup_offzero", row.sup_offzero},
                            {"prop2_bound", row.prop2_bound},
                            {"prop2_ok", row.prop2_ok}});
        r.report["result"] = {{"rows", rows}};
        finish(r, rep.ledger);
        return r;
    }
    if (c_walsh->parsed()) {
        DyadicMeasure mu = measure_from_arg(measure_arg);
        Rational lambda = rational_from_string(lambda_s), beta = rational_from_string(beta_s);
        WalshExpansion exp = walsh_coeffs(mu, nmax);
        std::ostringstream csv;
        csv << "n,g_lambda,walsh_w,haar_w\n";
        json rows = json::array();
        for (int n = 1; n < nmax; ++n) {
            BigInt W = floor_pow2(lambda * n);
            Rational g = g_lambda(exp, n, lambda);
            Rational ww = lorentz_norm(exp.groups[static_cast<std::size_t>(n)], W);
            Rational hw = lorentz_norm(haar_coeffs(mu, n), W);
            csv << n << "," << to_double(g) << "," << to_double(ww) << "," << to_double(hw) << "\n";
            rows.push_back({{"n", n}, {"g_lambda", to_double(g)}, {"walsh_w", to_double(ww)},
                            {"haar_w", to_double(hw)}});
            ledger.check("walsh_dominates_haar_n" + std::to_string(n), to_double(ww), ">=",
                         to_double(hw));
        }
        Rational parseval(0);
        for (const auto& g : exp.groups)
            for (const auto& v : g) parseval += v * v;
        parseval += exp.empty_coeff * exp.empty_coeff;
        Rational mass_side(0);
        for (const auto& [c, w] : coarsen(mu, nmax).atoms) mass_side += w * w;
        mass_side *= pow2(nmax);
        ledger.check("parseval_exact", mu.float_sampled ? 0 : (parseval == mass_side ? 0 : 1), "==", 0);
        r.report = base_report("walsh", {{"measure", measure_arg}, {"nmax", nmax},
                                         {"lambda", lambda_s}, {"beta", beta_s}});
        r.report["result"] = {{"rows", rows}};
        r.csv = csv.str();
        finish(r, ledger);
        return r;
    }
    if (c_manifest->parsed()) return run_manifest(manifest_path);
    throw std::invalid_argument("no subcommand handled");
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* t = std::getenv("DYADIC_SPECTRA_THREADS")) {
        int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string out_path, format = "json";
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--out") out_path = args[i + 1];
        if (args[i] == "--format") format = args[i + 1];
    }
    try {
        RunResult r = run_argv(args);
        emit(r, out_path, format);
        return r.exit_code;
    } catch (const CLI::ParseError& ex) {
        nlohmann::json err = {{"error", ex.what()}, {"kind", "usage"}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        nlohmann::json err = {{"error", ex.what()}, {"kind", "input"}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
