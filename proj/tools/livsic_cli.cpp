#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "livsic/charfn.hpp"
#include "livsic/colligation.hpp"
#include "livsic/factorize.hpp"
#include "livsic/io.hpp"
#include "livsic/models.hpp"
#include "livsic/multint.hpp"

using namespace livsic;
using json = io::json;

namespace {

struct Options {
    double tol = 1e-9;
    unsigned long long seed = 1;
    std::string out;
};

void emit(const Options& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        io::write_file(o.out, text);
}

void emit_json(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

Colligation load_colligation(const std::string& path) { return io::parse_colligation(io::read_file(path)); }

Signature parse_signature(const std::string& spec) {
    std::vector<int> s;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            s.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ParseError("bad signature entry '" + tok + "'");
        }
    }
    try {
        return Signature(s);
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

struct Axis {
    double lo, hi;
    int count;
    double at(int k) const { return count == 1 ? lo : lo + (hi - lo) * k / (count - 1); }
};

Axis parse_axis(const std::string& s) {
    Axis ax{};
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> ax.lo >> c1 >> ax.hi >> c2 >> ax.count) || c1 != ':' || c2 != ':' || ax.count < 1 ||
        !(in >> std::ws).eof())
        throw ParseError("bad grid axis '" + s + "', expected lo:hi:count");
    return ax;
}

std::vector<cplx> parse_grid(const std::string& spec) {
    auto comma = spec.find(',');
    if (comma == std::string::npos) throw ParseError("grid needs re0:re1:n,im0:im1:m");
    Axis re = parse_axis(spec.substr(0, comma)), im = parse_axis(spec.substr(comma + 1));
    std::vector<cplx> pts;
    for (int a = 0; a < im.count; ++a)
        for (int b = 0; b < re.count; ++b) pts.emplace_back(re.at(b), im.at(a));
    return pts;
}

unsigned thread_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LIVSIC_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

json check_row(const std::string& name, double value, double threshold, bool pass) {
    return {{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}};
}

// ---- commands ----

void cmd_embed(const Options& o, const std::string& input, const std::string& channel) {
    Mat A = io::parse_matrix(io::read_file(input));
    std::optional<SubspaceBasis> ch;
    if (channel == "full") ch = SubspaceBasis::full(A.rows());
    emit(o, io::serialize(embed(A, ch)));
}

void cmd_charfn(const Options& o, const std::string& input, const std::string& grid) {
    Colligation c = load_colligation(input);
    std::vector<cplx> pts = parse_grid(grid);
    std::vector<std::string> rows(pts.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t k = begin; k < pts.size(); k += stride) {
            CharFnSample s = eval_S(c, pts[k]);
            std::ostringstream line;
            line << fmt(pts[k].real()) << ',' << fmt(pts[k].imag()) << ',' << (s.regular ? "true" : "false");
            for (Eigen::Index i = 0; i < s.S.rows(); ++i)
                for (Eigen::Index j = 0; j < s.S.cols(); ++j)
                    line << ',' << (s.regular ? fmt(s.S(i, j).real()) : "nan") << ','
                         << (s.regular ? fmt(s.S(i, j).imag()) : "nan");
            if (s.regular) {
                double scale = 1 + std::pow(norm2(s.S), 2);
                line << ',' << to_string(classify(j_form(s.S, c.J), o.tol * scale));
            } else {
                line << ",pole";
            }
            rows[k] = line.str();
        }
    };
    unsigned nt = thread_count(pts.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work, t, nt);
    work(0, nt);
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "re_z,im_z,regular";
    for (Eigen::Index i = 0; i < c.r(); ++i)
        for (Eigen::Index j = 0; j < c.r(); ++j)
            csv << ",S" << i << j << "_re,S" << i << j << "_im";
    csv << ",class\n";
    for (const auto& r : rows) csv << r << '\n';
    emit(o, csv.str());
}

void cmd_factorize(const Options& o, const std::string& input) {
    Colligation c = load_colligation(input);
    BlaschkeProduct bp = potapov_factorize(c);
    ConstraintReport rep = constraint_suite(bp, c.Phi);
    json j = io::to_json(bp);
    j["constraints"] = {{"eta_residual", rep.eta_residual},
                        {"gram_residual", rep.gram_residual},
                        {"trace_slack", rep.trace_slack}};
    emit_json(o, j);
}

void cmd_product(const Options& o, const std::string& first, const std::string& second) {
    emit(o, io::serialize(product(load_colligation(first), load_colligation(second))));
}

void cmd_model(const Options& o, const std::string& discrete, const std::string& continuous, int N, long K,
               const std::string& signature) {
    if (discrete.empty() && continuous.empty()) throw ParseError("model needs --discrete and/or --continuous");
    CombinedModel cm;
    std::optional<Signature> J;
    if (!signature.empty()) J = parse_signature(signature);
    if (!discrete.empty()) {
        BlaschkeProduct bp = io::blaschke_from_json(io::parse_json(io::read_file(discrete)));
        if (J && *J != bp.J) throw ParseError("--J disagrees with the signature in the discrete file");
        J = bp.J;
        cm.discrete = discrete_data(bp);
    }
    if (K >= 0) cm.K = static_cast<std::size_t>(K);
    if (!continuous.empty()) {
        Eigen::Index r = J ? J->r() : 1;
        if (!J) J = Signature::plus(1);
        cm.continuous = io::parse_continuous_csv(io::read_file(continuous), r);
        cm.N = N;
    }
    Colligation c = build_combined_model(cm, *J);
    emit(o, io::serialize(c));
}

void cmd_multint(const Options& o, const std::string& input, double f, int max_levels) {
    StieltjesWeight w = io::parse_weight_csv(io::read_file(input));
    ScalarFn fn = [f](double) { return cplx(f, 0); };
    ProductIntegralResult res = multint_stieltjes(fn, w, o.tol, max_levels);
    BoundReport b = bound_suite(fn, w);
    json j;
    j["value"] = io::to_json(res.value);
    j["inverse"] = io::to_json(res.inverse);
    j["levels"] = res.levels;
    j["residual"] = res.residual;
    j["bounds"] = {{"rho", b.rho},
                   {"norm_W", b.norm_W},
                   {"slack_norm", b.slack_norm},
                   {"slack_unit", b.slack_unit},
                   {"slack_linear", b.slack_linear}};
    emit_json(o, j);
}

json demo_integration_operator(int N) {
    const Signature J = Signature::plus(1);
    const double e = std::exp(1.0);
    ContinuousModelData d = integration_operator_data(1);
    json table = json::array();
    double prev = 0;
    std::vector<int> sizes;
    for (int m = N / 8; m < N; m *= 2)
        if (m >= 1) sizes.push_back(m);
    sizes.push_back(N);
    cplx last;
    for (int m : sizes) {
        cplx s = eval_S(build_continuous_model(d, J, m), I_UNIT).S(0, 0);
        double err = std::abs(s - e);
        json row = {{"N", m}, {"S_i", io::to_json(s)}, {"error", err}};
        row["ratio"] = prev > 0 ? json(prev / err) : json(nullptr);
        table.push_back(row);
        prev = err;
        last = s;
    }
    Colligation c = build_continuous_model(d, J, N);
    json j;
    j["N"] = N;
    j["S_i"] = io::to_json(last);
    j["error"] = std::abs(last - e);
    j["convergence"] = table;
    j["checks"] = json::array({check_row("abs(S(i) - e)", std::abs(last - e), 1e-2, std::abs(last - e) <= 1e-2),
                               check_row("colligation identity", validate(c).identity_residual, 1e-9,
                                         validate(c).identity_residual <= 1e-9),
                               check_row("redundant dimension", static_cast<double>(principal_split(c).redundant.n()),
                                         0, principal_split(c).redundant.n() == 0)});
    return j;
}

json demo_unicellular(int N) {
    UnicellularReport rep = unicellular_demo(1, N);
    json entries = json::array();
    for (const auto& en : rep.entries)
        entries.push_back({{"sigma", en.sigma},
                           {"dim", en.dim},
                           {"invariance_residual", en.invariance_residual},
                           {"S_i", io::to_json(en.S_at_i)},
                           {"abs_S_i", std::abs(en.S_at_i)}});
    json j;
    j["N"] = N;
    j["entries"] = entries;
    j["checks"] = json::array({check_row("invariance residual", rep.max_invariance_residual, 1e-9,
                                         rep.max_invariance_residual <= 1e-9),
                               check_row("|S_sigma(i)| strictly increasing", rep.strictly_increasing ? 1 : 0, 1,
                                         rep.strictly_increasing)});
    return j;
}

json demo_completeness(const std::string& matrix_file) {
    Mat A;
    if (matrix_file.empty()) {
        A = Mat::Zero(2, 2);
        A(0, 0) = cplx(0, 1);
        A(1, 1) = cplx(0, 2);
    } else {
        A = io::parse_matrix(io::read_file(matrix_file));
    }
    CompletenessReport rep = completeness_criterion(A);
    json j;
    j["A"] = io::to_json(A);
    j["sum_im_eigs"] = rep.sum_im_eigs;
    j["trace_im_A"] = rep.trace_im_A;
    j["slack"] = rep.slack;
    j["status"] = rep.complete ? "complete" : "incomplete";
    j["departure_from_normality"] = rep.departure_from_normality;
    j["checks"] = json::array({check_row("trace inequality slack", rep.slack, -1e-9, rep.slack >= -1e-9)});
    return j;
}

json demo_energy_balance(unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    auto rnd = [&](Eigen::Index r, Eigen::Index c, double s) {
        Mat M(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index k = 0; k < c; ++k) M(i, k) = cplx(g(rng), g(rng)) * s;
        return M;
    };
    json runs = json::array();
    double worst = 0, worst_step = 0;
    for (int run = 0; run < 10; ++run) {
        Eigen::Index n = 2 + run % 4, r = 1 + run % 2;
        Mat X = rnd(n, n, 0.5);
        Mat H = (X + X.adjoint()) * 0.5;
        Mat Phi = rnd(r, n, 0.5);
        Signature J = Signature::plus(r);
        Colligation c{H + cplx(0, 0.5) * Phi.adjoint() * Phi, Phi, J};
        Vec amp = rnd(r, 1, 1.0), h0 = rnd(n, 1, 1.0);
        double w = 0.5 + run * 0.3;
        InputSignal in = [amp, w](double t) -> Vec { return amp * std::exp(cplx(0, w * t)); };
        OpenSystemTrace tr = simulate_open_system(c, in, h0, 1e-3, 5);
        double step = 0;
        for (double s : tr.step_residual) step = std::max(step, std::abs(s));
        worst = std::max(worst, tr.drift);
        worst_step = std::max(worst_step, step);
        runs.push_back({{"n", n}, {"r", r}, {"drift", tr.drift}, {"max_step_residual", step},
                        {"energy_start", tr.energy.front()}, {"energy_end", tr.energy.back()}});
    }
    json j;
    j["seed"] = seed;
    j["runs"] = runs;
    j["max_drift"] = worst;
    j["checks"] = json::array({check_row("max ledger drift", worst, 1e-8, worst <= 1e-8)});
    return j;
}

void cmd_demo(const Options& o, const std::string& name, int N, const std::string& matrix_file) {
    json j;
    if (name == "integration-operator")
        j = demo_integration_operator(N);
    else if (name == "unicellular")
        j = demo_unicellular(N);
    else if (name == "completeness")
        j = demo_completeness(matrix_file);
    else if (name == "energy-balance")
        j = demo_energy_balance(o.seed);
    else
        throw ParseError("unknown demo '" + name + "'");
    j["demo"] = name;
    emit_json(o, j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"livsic: colligations, characteristic functions and triangular models"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--tol", o.tol, "numerical tolerance")->capture_default_str();
    app.add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
    app.add_option("--out", o.out, "output file (default stdout)");

    std::string input, input2, channel = "imA", grid, discrete, continuous, signature, demo, matrix_file;
    int N = 200, max_levels = 20;
    long K = -1;
    double f = 1.0;

    auto* embed_cmd = app.add_subcommand("embed", "embed a matrix in a colligation");
    embed_cmd->add_option("input", input, "matrix JSON")->required();
    embed_cmd->add_option("--channel", channel, "external space")->check(CLI::IsMember({"full", "imA"}));

    auto* charfn_cmd = app.add_subcommand("charfn", "sample the characteristic function on a grid");
    charfn_cmd->add_option("input", input, "colligation JSON")->required();
    charfn_cmd->add_option("--grid", grid, "re0:re1:n,im0:im1:m")->required();

    auto* fact_cmd = app.add_subcommand("factorize", "multiplicative factorization");
    fact_cmd->add_option("input", input, "colligation JSON")->required();

    auto* prod_cmd = app.add_subcommand("product", "product of two colligations");
    prod_cmd->add_option("first", input, "colligation JSON")->required();
    prod_cmd->add_option("second", input2, "colligation JSON")->required();

    auto* model_cmd = app.add_subcommand("model", "assemble a triangular model");
    model_cmd->add_option("--discrete", discrete, "factor list JSON");
    model_cmd->add_option("--continuous", continuous, "continuous data CSV");
    model_cmd->add_option("--N", N, "cells for the continuous part")->check(CLI::PositiveNumber);
    model_cmd->add_option("--K", K, "number of discrete terms kept");
    model_cmd->add_option("--J", signature, "signature, e.g. 1,-1");

    auto* mult_cmd = app.add_subcommand("multint", "multiplicative integral of a sampled weight");
    mult_cmd->add_option("input", input, "weight CSV")->required();
    mult_cmd->add_option("--f", f, "constant integrand")->capture_default_str();
    mult_cmd->add_option("--max-levels", max_levels, "refinement levels")->check(CLI::Range(1, 30));

    auto* demo_cmd = app.add_subcommand("demo", "scripted scenarios");
    demo_cmd->add_option("name", demo, "scenario")
        ->required()
        ->check(CLI::IsMember({"integration-operator", "unicellular", "completeness", "energy-balance"}));
    demo_cmd->add_option("--N", N, "cells")->check(CLI::Range(2, 100000));
    demo_cmd->add_option("--matrix", matrix_file, "matrix JSON for the completeness demo");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*embed_cmd) cmd_embed(o, input, channel);
        if (*charfn_cmd) cmd_charfn(o, input, grid);
        if (*fact_cmd) cmd_factorize(o, input);
        if (*prod_cmd) cmd_product(o, input, input2);
        if (*model_cmd) cmd_model(o, discrete, continuous, N, K, signature);
        if (*mult_cmd) cmd_multint(o, input, f, max_levels);
        if (*demo_cmd) cmd_demo(o, demo, N, matrix_file);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
