// Command-line front end: solve the boundary-value problem, print the family
// closed forms, run the Abel non-integrability certificate, check the
// first-order reduction, draw phase portraits, and run the reproduction suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "lamptf/abel.hpp"
#include "lamptf/bvp.hpp"
#include "lamptf/family.hpp"
#include "lamptf/io.hpp"
#include "lamptf/phase.hpp"
#include "lamptf/reproduce.hpp"
#include "lamptf/svg.hpp"
#include "lamptf/tables.hpp"

namespace {

using nlohmann::json;
using namespace lamptf;

constexpr int kExitOk = 0;
constexpr int kExitReproduceFail = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitUsage = 64;

struct CommonArgs {
    double p = 1.0;
    std::string format;
    std::string out;
    double rtol = 1e-10;
    double atol = 1e-14;
    double slope_tol = 1e-10;
    double x_max = 50.0;
    std::vector<double> window;
    std::vector<double> seeds;
    double t_span = 8.0;
    bool json_report = false;
};

std::string out_stem(const CommonArgs& a, const std::string& cmd) {
    std::string stem = a.out;
    if (stem.empty()) stem = cmd + "_p" + fmt_short(a.p);
    for (const char* ext : {".csv", ".json", ".svg"}) {
        const std::string e(ext);
        if (stem.size() > e.size() && stem.compare(stem.size() - e.size(), e.size(), e) == 0)
            return stem.substr(0, stem.size() - e.size());
    }
    return stem;
}

void write_json_file(const std::string& path, const json& j) {
    CsvTable::write_text_file(path, j.dump(2) + "\n");
}

Window parse_window(const CommonArgs& a) {
    if (a.window.empty()) return Window{};
    Window w{a.window[0], a.window[1], a.window[2], a.window[3]};
    if (w.degenerate()) throw CLI::ValidationError("--window", "window must have positive extent");
    return w;
}

double require_solvable_p(double p) {
    if (std::isnan(p) || p <= 0.0 || std::isinf(p))
        throw CLI::ValidationError("--p", "this command needs a finite p > 0");
    return p;
}

int cmd_solve(const CommonArgs& a) {
    require_solvable_p(a.p);
    SolveOptions opt;
    opt.slope_tol = a.slope_tol;
    opt.x_max = a.x_max;
    opt.shot.rtol = a.rtol;
    opt.shot.atol = a.atol;
    const TFSolution sol = solve_bvp(a.p, opt);

    const std::string stem = out_stem(a, "solve");
    curve_table(sol.curve).write(stem + ".csv");

    json j;
    j["p"] = sol.p;
    j["slope"] = sol.slope;
    j["bracket"] = {sol.bracket.first, sol.bracket.second};
    j["slope_tol"] = a.slope_tol;
    j["x_max"] = a.x_max;
    j["representative"] = to_string(sol.representative_kind);
    json tail = json::array();
    for (const auto& [x, w] : sol.ratio_tail) tail.push_back({x, w});
    j["ratio_tail"] = tail;
    write_json_file(stem + ".json", j);

    std::cout << j.dump(2) << "\n";
    std::cerr << "wrote " << stem << ".csv and " << stem << ".json\n";
    return kExitOk;
}

int cmd_perturb(const CommonArgs& a) {
    require_solvable_p(a.p);
    const ParticularSolution ps = particular_solution(a.p);
    const OscillatorCoefficients oc = oscillator_coefficients(a.p);
    const PerturbationExpansion pe = perturbation_expansion(a.p);

    json j;
    j["p"] = a.p;
    j["particular"] = {{"k", ps.k}, {"exponent", ps.exponent}};
    j["oscillator"] = {{"zeta", oc.zeta}, {"kappa", oc.kappa}, {"r1", oc.r1}, {"r2", oc.r2}};
    j["expansion"] = {{"c_lin", pe.c_lin},
                      {"exponents", {pe.exp_minus, pe.exp_plus}},
                      {"c_quad", pe.c_quad},
                      {"pow_quad", pe.pow_quad},
                      {"c_cub", pe.c_cub},
                      {"pow_cub", pe.pow_cub}};

    const std::string stem = out_stem(a, "perturb");
    if (a.format == "csv") {
        CsvTable t({"quantity", "value"});
        t.add_row({"k", fmt17(ps.k)});
        t.add_row({"exponent", fmt17(ps.exponent)});
        t.add_row({"zeta", fmt17(oc.zeta)});
        t.add_row({"kappa", fmt17(oc.kappa)});
        t.add_row({"r1", fmt17(oc.r1)});
        t.add_row({"r2", fmt17(oc.r2)});
        t.add_row({"c_lin", fmt17(pe.c_lin)});
        t.add_row({"exp_minus", fmt17(pe.exp_minus)});
        t.add_row({"exp_plus", fmt17(pe.exp_plus)});
        t.add_row({"c_quad", fmt17(pe.c_quad)});
        t.add_row({"pow_quad", fmt17(pe.pow_quad)});
        t.add_row({"c_cub", fmt17(pe.c_cub)});
        t.add_row({"pow_cub", fmt17(pe.pow_cub)});
        t.write(stem + ".csv");
        std::cerr << "wrote " << stem << ".csv\n";
    } else {
        write_json_file(stem + ".json", j);
        std::cerr << "wrote " << stem << ".json\n";
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_abel(const CommonArgs& a) {
    require_solvable_p(a.p);
    const AbelForm form = abel_coefficients(a.p);
    const AbelInvariant inv = abel_invariant_form(a.p);
    const IntegrabilityReport rep = check_integrability(a.p, default_w_grid());

    json j;
    j["p"] = a.p;
    j["f2"] = form.f2;
    j["f3_amp"] = form.f3_amp;
    j["f3_pow"] = form.f3_pow;
    j["invariant"] = {{"A", inv.A}, {"B", inv.B}, {"pow", inv.pow}};
    json samples = json::array();
    for (const auto& [w, alpha] : rep.samples) samples.push_back({w, alpha});
    j["alpha_samples"] = samples;
    j["alpha_spread"] = rep.alpha_spread;
    j["alpha_spread_phi_positive"] = rep.spread_phi_positive;
    j["alpha_spread_phi_negative"] = rep.spread_phi_negative;
    j["excluded"] = rep.excluded;
    j["tol"] = rep.tol;
    j["verdict"] = to_string(rep.verdict);

    const std::string stem = out_stem(a, "abel");
    if (a.format == "csv") {
        alpha_table(rep.samples).write(stem + ".csv");
        std::cerr << "wrote " << stem << ".csv\n";
    } else {
        write_json_file(stem + ".json", j);
        std::cerr << "wrote " << stem << ".json\n";
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_majorana(const CommonArgs& a) {
    require_solvable_p(a.p);
    SolveOptions opt;
    opt.slope_tol = a.slope_tol;
    opt.x_max = a.x_max;
    opt.shot.rtol = std::min(a.rtol, 1e-11);
    opt.shot.atol = std::min(a.atol, 1e-14);
    const TFSolution sol = solve_bvp(a.p, opt);

    const ParticularSolution y0 = particular_solution(a.p);
    const double m = y0.exponent;
    std::vector<double> w, s;
    const int n = 2000;
    const double x_lo = 0.05, x_hi = 0.98 * sol.curve.t_last();
    for (int i = 0; i < n; ++i) {
        const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (n - 1));
        const auto st = dense_eval(sol.curve, x);
        const double xm = std::pow(x, m);
        w.push_back(st[0] * xm / y0.k);
        s.push_back(xm * (x * st[1] + m * st[0]) / y0.k);
    }
    const MajoranaReport rep = majorana_consistency(a.p, w, s);

    json j;
    j["p"] = a.p;
    j["slope"] = sol.slope;
    j["tau_min"] = rep.tau_min;
    j["tau_max"] = rep.tau_max;
    j["n_used"] = rep.n_used;
    j["n_excluded"] = rep.n_excluded;
    j["max_residual"] = rep.max_residual;

    const std::string stem = out_stem(a, "majorana");
    if (a.format == "csv") {
        CsvTable t({"tau", "u", "du_dtau_fd", "du_dtau_rhs"});
        for (const auto& row : rep.table) t.add_numeric_row({row[0], row[1], row[2], row[3]});
        t.write(stem + ".csv");
        std::cerr << "wrote " << stem << ".csv\n";
    } else {
        write_json_file(stem + ".json", j);
        std::cerr << "wrote " << stem << ".json\n";
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_phase(const CommonArgs& a) {
    const AutonomousSystem sys = family_system(family_params(a.p));
    const Window w = parse_window(a);

    std::vector<Vec2> seeds;
    if (a.seeds.empty()) {
        seeds = default_seeds(sys, w);
    } else {
        if (a.seeds.size() % 2 != 0)
            throw CLI::ValidationError("--seeds", "need an even number of coordinates");
        for (std::size_t i = 0; i + 1 < a.seeds.size(); i += 2)
            seeds.push_back({a.seeds[i], a.seeds[i + 1]});
    }

    PortraitOptions popt;
    popt.rtol = std::min(a.rtol, 1e-9);
    const PhasePortrait por = portrait(sys, seeds, a.t_span, w, popt);

    const std::string stem = out_stem(a, "phase");
    CsvTable::write_text_file(stem + ".svg", render_portrait_svg(por));
    fixed_point_table(por.points).write(stem + ".csv");
    std::cerr << "wrote " << stem << ".svg and " << stem << ".csv\n";
    std::cout << fixed_point_table(por.points).str();
    return kExitOk;
}

int cmd_classify(const CommonArgs& a) {
    const AutonomousSystem sys = family_system(family_params(a.p));
    const auto pts = classified_fixed_points(sys);

    json j;
    j["p"] = a.p;
    j["n"] = sys.n;
    j["lambda"] = sys.lambda;
    json arr = json::array();
    for (const auto& fp : pts) {
        json e;
        e["X"] = fp.coords.x;
        e["Y"] = fp.coords.y;
        e["delta1"] = fp.trace;
        e["delta2"] = fp.det;
        e["Delta"] = fp.discriminant;
        e["kind"] = to_string(fp.kind);
        e["eigenvalues"] = {{"re1", fp.theta1.real()},
                            {"im1", fp.theta1.imag()},
                            {"re2", fp.theta2.real()},
                            {"im2", fp.theta2.imag()}};
        if (!fp.note.empty()) e["note"] = fp.note;
        arr.push_back(e);
    }
    j["fixed_points"] = arr;

    const std::string stem = out_stem(a, "classify");
    if (a.format == "csv") {
        fixed_point_table(pts).write(stem + ".csv");
        std::cerr << "wrote " << stem << ".csv\n";
        std::cout << fixed_point_table(pts).str();
    } else {
        write_json_file(stem + ".json", j);
        std::cerr << "wrote " << stem << ".json\n";
        std::cout << j.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_reproduce(const CommonArgs& a) {
    const ReproduceReport rep = run_reproduction();
    if (a.json_report) {
        json j;
        json arr = json::array();
        for (const auto& r : rep.results)
            arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
        j["criteria"] = arr;
        j["all_pass"] = rep.all_pass;
        j["elapsed_s"] = rep.elapsed_s;
        std::cout << j.dump(2) << "\n";
        if (!a.out.empty()) write_json_file(out_stem(a, "reproduce") + ".json", j);
    } else {
        for (const auto& r : rep.results)
            std::printf("%s criterion %2d: %s%s%s\n", r.pass ? "PASS" : "FAIL", r.id,
                        r.name.c_str(), r.details.empty() ? "" : " -- ", r.details.c_str());
        std::printf("elapsed: %.2fs\n", rep.elapsed_s);
    }
    return rep.all_pass ? kExitOk : kExitReproduceFail;
}

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_p = true) {
    auto* p = cmd->add_option("--p", a.p, "family parameter p (inf accepted where meaningful)");
    if (needs_p) p->required();
    cmd->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--out", a.out, "output path stem (extension added per format)");
    cmd->add_option("--rtol", a.rtol, "relative integration tolerance");
    cmd->add_option("--atol", a.atol, "absolute integration tolerance");
    cmd->add_option("--slope-tol", a.slope_tol, "bisection bracket width target")
        ->check(CLI::Range(1e-12, 1.0));
    cmd->add_option("--x-max", a.x_max, "truncation point standing in for infinity");
    cmd->add_option("--window", a.window, "plot window x0 x1 y0 y1")->expected(4);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for the one-parameter family of generalized "
                 "Thomas-Fermi equations y'' = x^{-p/(p+1)} y^{1+p/(p+1)}"};
    app.require_subcommand(1);

    CommonArgs a;

    auto* solve = app.add_subcommand("solve", "shoot the boundary-value problem for y(0)=1, y(inf)=0");
    add_common(solve, a);
    auto* perturb = app.add_subcommand("perturb", "closed forms: particular solution, oscillator, expansion");
    add_common(perturb, a);
    auto* abel = app.add_subcommand("abel", "Abel reduction, invariant, integrability verdict");
    add_common(abel, a);
    auto* majorana = app.add_subcommand("majorana", "first-order reduction consistency along the solved curve");
    add_common(majorana, a);
    auto* phase = app.add_subcommand("phase", "phase portrait SVG plus fixed-point CSV");
    add_common(phase, a);
    phase->add_option("--seeds", a.seeds, "explicit trajectory seeds x0 y0 x1 y1 ...");
    phase->add_option("--t-span", a.t_span, "integration span per trajectory");
    auto* classify = app.add_subcommand("classify", "fixed points with trace/determinant classification");
    add_common(classify, a);
    auto* reproduce = app.add_subcommand("reproduce", "run the full reproduction suite");
    add_common(reproduce, a, false);
    reproduce->add_flag("--json", a.json_report, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(a);
        if (perturb->parsed()) return cmd_perturb(a);
        if (abel->parsed()) return cmd_abel(a);
        if (majorana->parsed()) return cmd_majorana(a);
        if (phase->parsed()) return cmd_phase(a);
        if (classify->parsed()) return cmd_classify(a);
        if (reproduce->parsed()) return cmd_reproduce(a);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BracketError& e) {
        nlohmann::json diag{{"error", "bracket failure"}, {"what", e.what()}};
        std::cerr << diag.dump(2) << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
