#include "reluforge/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "reluforge/acceptance.hpp"
#include "reluforge/algebra.hpp"
#include "reluforge/constructions.hpp"
#include "reluforge/grid.hpp"
#include "reluforge/json_io.hpp"
#include "reluforge/selfsimilar.hpp"
#include "reluforge/sobolev.hpp"
#include "reluforge/splines.hpp"
#include "reluforge/training.hpp"

namespace reluforge {

namespace {

Vec parse_doubles(const std::string& s) {
    Vec out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoul(cell));
    return out;
}

void print_complexity(const Network& net) {
    ComplexityReport r = complexity(net);
    std::cout << "L=" << r.hidden_layers << " layers=" << r.total_layers
              << " N=" << r.total_neurons << " P=" << r.nonzero_params
              << " slots=" << r.param_slots << " width=" << r.width << "\n";
}

DerivativeOracle oracle_by_name(const std::string& name) {
    DerivativeOracle f;
    if (name == "sin2pi") {
        f.d = 1;
        f.deriv = [](const MultiIndex& a, const Vec& x) {
            double r = static_cast<double>(a.a[0]);
            return std::pow(2.0 * M_PI, r) * std::sin(2.0 * M_PI * x[0] + r * M_PI / 2.0);
        };
    } else if (name == "sincos") {
        f.d = 2;
        f.deriv = [](const MultiIndex& a, const Vec& x) {
            double p = static_cast<double>(a.a[0]), q = static_cast<double>(a.a[1]);
            return std::pow(2.0 * M_PI, p + q) * std::sin(2.0 * M_PI * x[0] + p * M_PI / 2.0) *
                   std::cos(2.0 * M_PI * x[1] + q * M_PI / 2.0);
        };
    } else {
        throw CLI::ValidationError("--target", "unknown target " + name);
    }
    return f;
}

struct CsvWriter {
    std::ofstream f;
    explicit CsvWriter(const std::string& path) : f(path) {
        if (!f) throw std::runtime_error("cannot open " + path);
        f << "experiment,param,error,L,N,P,rate\n";
    }
    void row(const std::string& exp, double param, double err, const ComplexityReport& r,
             const std::string& rate) {
        f << exp << "," << param << "," << err << "," << r.hidden_layers << ","
          << r.total_neurons << "," << r.nonzero_params << "," << rate << "\n";
    }
};

int do_report(const std::string& family, const std::string& out) {
    CsvWriter csv(out);
    if (family == "squarer") {
        Vec ms, errs;
        std::vector<ComplexityReport> reps;
        for (std::size_t m = 1; m <= 8; ++m) {
            Network net = squarer_network({m, 0.0});
            double sup = sup_error_1d(net, [](double x) { return x * x; }, 0.0, 1.0, 20000);
            // include the exact-maximum dyadic midpoints
            for (std::size_t i = 0; i < (1u << m); ++i) {
                double mp = (static_cast<double>(i) + 0.5) / std::pow(2.0, static_cast<double>(m));
                sup = std::max(sup, std::fabs(evaluate(net, {mp})[0] - mp * mp));
            }
            ms.push_back(static_cast<double>(m));
            errs.push_back(sup);
            reps.push_back(complexity(net));
        }
        std::vector<std::pair<std::size_t, double>> pts;
        for (std::size_t i = 0; i < ms.size(); ++i)
            pts.push_back({static_cast<std::size_t>(ms[i]), errs[i]});
        double factor = 1.0 / rate_fit(pts).base; // per-level error multiplier
        for (std::size_t i = 0; i < ms.size(); ++i)
            csv.row("squarer", ms[i], errs[i], reps[i], std::to_string(factor));
        std::cout << "squarer per-level error factor " << factor << "\n";
    } else if (family == "takagi") {
        std::vector<std::pair<std::size_t, double>> pts;
        std::vector<ComplexityReport> reps;
        Vec grid = uniform_grid(0.0, 1.0, 10000);
        for (std::size_t L = 2; L <= 10; ++L) {
            TakagiSpec s{2.0, {}, L};
            Network net = takagi_network(s);
            double m = 0.0;
            for (double x : grid)
                m = std::max(m, std::fabs(evaluate(net, {x})[0] - takagi_reference(s, x, 40)));
            pts.push_back({L, m});
            reps.push_back(complexity(net));
        }
        double base = rate_fit(pts).base;
        for (std::size_t i = 0; i < pts.size(); ++i)
            csv.row("takagi", static_cast<double>(pts[i].first), pts[i].second, reps[i],
                    std::to_string(base));
        std::cout << "takagi fitted base " << base << "\n";
    } else if (family == "sobolev") {
        DerivativeOracle f = oracle_by_name("sin2pi");
        Vec ns{2, 4, 8, 16}, errs;
        for (double n : ns) {
            GlobalApprox g = global_approx(f, static_cast<std::size_t>(n), 2);
            errs.push_back(lp_error([&](const Vec& x) { return f(x); },
                                    [&](const Vec& x) { return g(x); },
                                    std::numeric_limits<double>::infinity(), 1, 2000));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = static_cast<double>(ns.size());
        for (std::size_t i = 0; i < ns.size(); ++i) {
            double x = std::log(ns[i]), y = std::log(errs[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        for (std::size_t i = 0; i < ns.size(); ++i)
            csv.row("sobolev_fn", ns[i], errs[i], ComplexityReport{}, std::to_string(slope));
        std::cout << "sobolev f_n log-log slope " << slope << "\n";
    } else if (family == "spline") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t n : {5u, 50u, 500u}) {
            Vec bp(n), vals(n + 2);
            for (std::size_t i = 0; i < n; ++i)
                bp[i] = (static_cast<double>(i) + 0.2 + 0.6 * u(rng)) / static_cast<double>(n + 1);
            for (auto& v : vals) v = 2.0 * u(rng) - 1.0;
            FreeKnotSpline S = make_spline(bp, vals);
            auto [net, rep] = theorem1(S, 8);
            double sup = sup_error_1d(
                net, [&](double x) { return eval_spline(S, x); }, 0.0, 1.0, 100000);
            csv.row("spline_w8", static_cast<double>(n), sup, rep, "");
        }
        std::cout << "spline embeddings written\n";
    } else {
        throw CLI::ValidationError("--family", "unknown family " + family);
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"constructive ReLU network toolkit"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "emit a constructed network as JSON");
    std::string family, out_path;
    std::size_t m = 2, s = 2, n = 2, d = 1;
    double eps = 1e-3, D = 1.0;
    std::string mindex = "0";
    build->add_option("family", family, "hat|hat21|sawtooth|squarer|multiplier|pou|identity")
        ->required();
    build->add_option("--m", m, "squarer levels");
    build->add_option("--s", s, "sawtooth compositions");
    build->add_option("--eps", eps, "target accuracy");
    build->add_option("--D", D, "multiplier domain half-width");
    build->add_option("--n", n, "partition grid");
    build->add_option("--d", d, "dimension");
    build->add_option("--mindex", mindex, "partition cell, comma-separated");
    build->add_option("-o,--out", out_path, "output JSON path")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a stored network");
    std::string net_path, xs_str = "0";
    ev->add_option("--net", net_path, "network JSON")->required();
    ev->add_option("--x", xs_str, "input, comma-separated")->required();

    // error
    auto* er = app.add_subcommand("error", "sup error of a stored network vs a reference");
    std::string err_net, target = "square";
    std::size_t grid_n = 10000;
    double lo = 0.0, hi = 1.0;
    er->add_option("--net", err_net)->required();
    er->add_option("--target", target, "square|product|sin2pi");
    er->add_option("--grid", grid_n, "grid points per dimension");
    er->add_option("--lo", lo);
    er->add_option("--hi", hi);

    // embed-spline
    auto* emb = app.add_subcommand("embed-spline", "embed a free-knot spline");
    std::string knots_path, emb_out;
    std::size_t width = 8;
    emb->add_option("--knots", knots_path, "spline JSON")->required();
    emb->add_option("--width", width, "network width (>= 8)");
    emb->add_option("-o,--out", emb_out, "output JSON path");

    // takagi
    auto* tak = app.add_subcommand("takagi", "self-similar composition sums");
    double base = 2.0;
    std::size_t depth = 4;
    std::string tak_out, tak_report;
    tak->add_option("--base", base, "geometric coefficient base");
    tak->add_option("--depth", depth, "truncation depth");
    tak->add_option("-o,--out", tak_out, "output JSON path");
    tak->add_option("--report", tak_report, "CSV sweep over depths 2..depth");

    // sobolev
    auto* sob = app.add_subcommand("sobolev", "end-to-end smooth-function pipeline");
    std::size_t kord = 2;
    double seps = 0.05;
    std::string sob_target = "sin2pi", sob_out, p_str = "inf";
    sob->add_option("--k", kord, "smoothness order");
    sob->add_option("--eps", seps, "target accuracy");
    sob->add_option("--target", sob_target, "sin2pi|sincos");
    sob->add_option("--p", p_str, "norm: inf or a real >= 1");
    sob->add_option("-o,--out", sob_out, "output JSON path");

    // train
    auto* tr = app.add_subcommand("train", "mini-batch SGD on a CSV dataset");
    std::string data_path, loss_str = "quadratic", hidden_str = "8", train_out;
    std::size_t input_dim = 1, batch = 16, epochs = 50, patience = 0;
    double eta = 0.1, l1 = 0.0, l2 = 0.0, val_split = 0.2;
    unsigned seed = 42;
    tr->add_option("--data", data_path, "CSV: inputs then targets")->required();
    tr->add_option("--input-dim", input_dim)->required();
    tr->add_option("--hidden", hidden_str, "hidden widths, comma-separated");
    tr->add_option("--loss", loss_str, "quadratic|cross_entropy");
    tr->add_option("--eta", eta);
    tr->add_option("--batch", batch);
    tr->add_option("--epochs", epochs);
    tr->add_option("--seed", seed);
    tr->add_option("--l1", l1);
    tr->add_option("--l2", l2);
    tr->add_option("--patience", patience, "early stopping patience (0 = off)");
    tr->add_option("--val-split", val_split);
    tr->add_option("-o,--out", train_out, "trained network JSON");

    // report
    auto* rep = app.add_subcommand("report", "rate sweeps as CSV");
    std::string rep_family, rep_out = "report.csv";
    rep->add_option("--family", rep_family, "squarer|takagi|sobolev|spline")->required();
    rep->add_option("-o,--out", rep_out, "CSV path");

    // verify
    app.add_subcommand("verify", "run the full acceptance/invariant suite");

    std::vector<const char*> argv;
    argv.push_back("reluforge");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) {
            Network net;
            if (family == "hat") net = hat_network();
            else if (family == "hat21") net = hat_network_m21();
            else if (family == "sawtooth") net = sawtooth_network(s);
            else if (family == "squarer") net = squarer_network({m, 0.0});
            else if (family == "multiplier") {
                MultiplierSpec ms{D, eps, 0.0, 1.0};
                net = multiplier_network(ms);
                std::cout << "delta=" << ms.delta << "\n";
            } else if (family == "pou") {
                Vec mi = parse_doubles(mindex);
                std::vector<std::size_t> cell(mi.begin(), mi.end());
                cell.resize(d, 0);
                net = pou_network(PoUIndex{cell, n, d});
            } else if (family == "identity") net = identity_network(d);
            else throw CLI::ValidationError("family", "unknown family " + family);
            save_network(net, out_path);
            print_complexity(net);
        } else if (ev->parsed()) {
            Network net = load_network(net_path);
            Vec y = evaluate(net, parse_doubles(xs_str));
            for (std::size_t i = 0; i < y.size(); ++i)
                std::cout << (i ? " " : "") << std::setprecision(17) << y[i];
            std::cout << "\n";
        } else if (er->parsed()) {
            Network net = load_network(err_net);
            double sup = 0.0;
            if (target == "square") {
                sup = sup_error_1d(net, [](double x) { return x * x; }, lo, hi, grid_n);
            } else if (target == "sin2pi") {
                sup = sup_error_1d(net, [](double x) { return std::sin(2.0 * M_PI * x); }, lo,
                                   hi, grid_n);
            } else if (target == "product") {
                Vec g = uniform_grid(lo, hi, grid_n);
                for (double x : g)
                    for (double y : g)
                        sup = std::max(sup, std::fabs(evaluate(net, {x, y})[0] - x * y));
            } else {
                throw CLI::ValidationError("--target", "unknown target " + target);
            }
            std::cout << std::setprecision(17) << sup << "\n";
        } else if (emb->parsed()) {
            FreeKnotSpline S = load_spline(knots_path);
            auto [net, r] = theorem1(S, width);
            if (!emb_out.empty()) save_network(net, emb_out);
            print_complexity(net);
        } else if (tak->parsed()) {
            if (!tak_report.empty()) {
                return do_report("takagi", tak_report);
            }
            TakagiSpec spec{base, {}, depth};
            Network net = takagi_network(spec);
            if (!tak_out.empty()) save_network(net, tak_out);
            double sup = 0.0;
            for (double x : uniform_grid(0.0, 1.0, 10000))
                sup = std::max(sup,
                               std::fabs(evaluate(net, {x})[0] - takagi_reference(spec, x, depth + 30)));
            std::cout << "truncation-vs-reference gap " << sup << "\n";
            print_complexity(net);
        } else if (sob->parsed()) {
            double p = (p_str == "inf") ? std::numeric_limits<double>::infinity()
                                        : std::stod(p_str);
            SobolevResult res = approximate_sobolev(oracle_by_name(sob_target), kord, p, seps);
            if (!sob_out.empty()) save_network(res.net, sob_out);
            std::cout << "n=" << res.n << " fn_error=" << res.fn_error
                      << " measured=" << res.measured_error << " slack=" << res.slack << "\n";
            print_complexity(res.net);
        } else if (tr->parsed()) {
            Dataset ds = load_dataset_csv(data_path, input_dim);
            if (ds.inputs.empty()) throw std::runtime_error("empty dataset " + data_path);
            TrainConfig cfg;
            cfg.eta = eta;
            cfg.batch_size = std::min(batch, ds.inputs.size());
            cfg.epochs = epochs;
            cfg.seed = seed;
            cfg.loss = (loss_str == "cross_entropy") ? LossKind::cross_entropy
                                                     : LossKind::quadratic;
            if (l1 > 0.0) cfg.reg = {Regularizer::Kind::l1, l1};
            if (l2 > 0.0) cfg.reg = {Regularizer::Kind::l2, l2};
            if (patience > 0) cfg.early = EarlyStopping{patience, val_split};
            Network net =
                random_network(input_dim, parse_sizes(hidden_str), ds.targets[0].size(), seed,
                               Act::relu,
                               cfg.loss == LossKind::cross_entropy ? Act::softmax
                                                                   : Act::identity);
            TrainResult res = sgd_train(net, ds, cfg);
            if (!train_out.empty()) save_network(res.net, train_out);
            std::cout << "epochs=" << res.epochs_run
                      << " final_loss=" << res.train_loss.back() << "\n";
        } else if (rep->parsed()) {
            return do_report(rep_family, rep_out);
        } else { // verify
            bool all = true;
            for (const auto& c : run_acceptance()) {
                std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " ("
                          << c.name << "): " << c.detail << "\n";
                all = all && c.pass;
            }
            return all ? 0 : 1;
        }
    } catch (const CLI::ValidationError&) {
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace reluforge
