#include "anchorlab/cli.hpp"

#include "anchorlab/battery.hpp"
#include "anchorlab/correlation_break.hpp"
#include "anchorlab/errors.hpp"
#include "anchorlab/game.hpp"
#include "anchorlab/seesaw.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace anchorlab {

namespace {

// Canonical shortest round-trip float text, shared with the JSON writer so
// CSV and JSON agree byte-for-byte across reruns.
std::string num(double v) { return nlohmann::ordered_json(v).dump(); }

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "IO_ERROR", "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail("PARSE_ERROR", path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    require(out.good(), "IO_ERROR", "cannot open " + path + " for writing");
    out << text;
    require(out.good(), "IO_ERROR", "short write to " + path);
}

Game load_game(const std::string& path) { return Game::from_json(load_json(path)); }

// Anchor weight read off the input table: the anchor column (or row) keeps
// mass zeta under every anchoring order, so the column mass is the weight.
bool detect_anchor(const Game& g, double& zeta) {
    const std::size_t ny = g.y_alphabet.size();
    for (std::size_t y = 0; y < ny; ++y)
        if (g.y_alphabet[y] == kAnchorLabel) {
            zeta = 0.0;
            for (std::size_t x = 0; x < g.x_alphabet.size(); ++x)
                zeta += g.input_weight(x, y);
            return true;
        }
    for (std::size_t x = 0; x < g.x_alphabet.size(); ++x)
        if (g.x_alphabet[x] == kAnchorLabel) {
            zeta = 0.0;
            for (std::size_t y = 0; y < ny; ++y) zeta += g.input_weight(x, y);
            return true;
        }
    return false;
}

struct SeesawFlags {
    Eigen::Index dim = 2;
    int restarts = 8;
    int iters = 300;
    double tol = 1e-8;
    std::uint64_t seed = 7;
};

void add_seesaw_flags(CLI::App* sub, SeesawFlags& f) {
    sub->add_option("--dim", f.dim, "local dimension for the see-saw");
    sub->add_option("--restarts", f.restarts, "independent see-saw restarts");
    sub->add_option("--iters", f.iters, "see-saw iteration cap per restart");
    sub->add_option("--tol", f.tol, "see-saw convergence tolerance");
    sub->add_option("--seed", f.seed, "see-saw base seed");
}

int run_value(const std::string& game_path, const std::string& mode,
              const SeesawFlags& f, const std::string& out_path, std::ostream& out) {
    Game game = load_game(game_path);
    nlohmann::ordered_json machine;
    machine["mode"] = mode;
    double value = 0.0;
    if (mode == "classical") {
        value = classical_value_exact(game).value;
    } else {
        SeesawResult res =
            entangled_value_seesaw(game, f.dim, f.restarts, f.iters, f.tol, f.seed);
        value = res.value;
        machine["dim"] = f.dim;
        machine["restarts"] = f.restarts;
        machine["iters"] = f.iters;
        machine["tol"] = f.tol;
        machine["seed"] = f.seed;
        machine["converged"] = res.converged;
    }
    machine["value"] = value;
    out << num(value) << "\n";
    if (!out_path.empty()) write_text(out_path, machine.dump(2) + "\n");
    return 0;
}

int run_anchor(const std::string& game_path, const std::string& side, double zeta,
               const std::string& out_path, std::ostream& out) {
    Game game = load_game(game_path);
    AnchorSpec spec;
    spec.side = side;
    spec.zeta = zeta;
    Game anchored = anchor_game(game, spec);
    out << "anchored side=" << side << " zeta=" << num(zeta) << " alphabets "
        << game.x_alphabet.size() << "," << game.y_alphabet.size() << " -> "
        << anchored.x_alphabet.size() << "," << anchored.y_alphabet.size() << "\n";
    if (!out_path.empty()) write_text(out_path, anchored.to_json().dump(2) + "\n");
    return 0;
}

int run_repeat(const std::string& game_path, int k, const std::string& out_path,
               std::ostream& out) {
    Game game = load_game(game_path);
    Game repeated = repeat_game(game, k);
    out << "repeated k=" << k << " alphabets " << repeated.x_alphabet.size() << ","
        << repeated.y_alphabet.size() << "," << repeated.a_alphabet.size() << ","
        << repeated.b_alphabet.size() << "\n";
    if (!out_path.empty()) write_text(out_path, repeated.to_json().dump(2) + "\n");
    return 0;
}

int run_breaker(const std::string& game_path, double zeta, const std::string& out_path,
                std::ostream& out) {
    Game game = load_game(game_path);
    BreakerBase base = breaker_base_from_game(game, zeta);
    BreakerJoint joint = build_joint(base.p, base.zeta);
    const double marginal_gap = verify_marginal(joint);
    const double cmi = breaker_conditional_mi(joint);
    const double mismatch = mismatch_probability(joint);
    const double third = std::cbrt(1.0 - base.zeta);
    const double closed = third * third * (1.0 - third);
    const double g_size =
        static_cast<double>(joint.joint.axes().back().labels.size());
    IndependenceThresholds th = independence_thresholds(base.zeta, g_size);

    out << "zeta=" << num(base.zeta) << "\n"
        << "marginal_l1=" << num(marginal_gap) << "\n"
        << "conditional_mi_bits=" << num(cmi) << "\n"
        << "mismatch=" << num(mismatch) << " closed_form=" << num(closed) << "\n"
        << "delta=" << num(th.delta) << " delta_prime=" << num(th.delta_prime) << "\n";

    if (!out_path.empty()) {
        nlohmann::ordered_json machine;
        machine["zeta"] = base.zeta;
        machine["marginal_l1"] = marginal_gap;
        machine["conditional_mi_bits"] = cmi;
        machine["mismatch"] = mismatch;
        machine["mismatch_closed_form"] = closed;
        machine["delta"] = th.delta;
        machine["delta_prime"] = th.delta_prime;
        machine["joint"] = joint.joint.to_json();
        write_text(out_path, machine.dump(2) + "\n");
    }
    const bool ok = marginal_gap <= 1e-12 && cmi <= 1e-10 &&
                    std::abs(mismatch - closed) <= 1e-12 &&
                    mismatch <= base.zeta / 3.0 + 1e-12;
    if (!ok) out << "breaker checks: VIOLATED\n";
    return ok ? 0 : 1;
}

int run_verify(const std::string& suite, std::size_t trials, std::uint64_t seed,
               const std::string& out_path, std::ostream& out) {
    BatteryConfig cfg;
    cfg.suite = suite;
    cfg.trials = trials;
    cfg.seed = seed;
    BatteryReport report = run_battery(cfg);
    for (const auto& f : report.facts) {
        out << "fact " << f.fact << ": trials=" << f.trials
            << " min_margin=" << num(f.min_margin) << " violations=" << f.violations;
        if (f.report_only) out << " discrepancies=" << f.discrepancies;
        out << "\n";
    }
    out << "battery: " << (report.pass ? "PASS" : "FAIL") << " (suite " << suite
        << ", seed " << seed << ", " << trials << " trials/fact)\n";
    if (!out_path.empty()) write_text(out_path, report.to_json().dump(2) + "\n");
    return report.pass ? 0 : 1;
}

int run_decay(const std::string& game_path, int kmax, const SeesawFlags& f, double C,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
    Game game = load_game(game_path);
    require(kmax >= 1, "PARAM_RANGE", "kmax must be at least 1");
    const double per_copy =
        static_cast<double>(game.x_alphabet.size()) * game.y_alphabet.size() *
        game.a_alphabet.size() * game.b_alphabet.size();
    require(std::pow(per_copy, kmax) <= 1e8 + 0.5, "SIZE_GUARD",
            "repeated game at kmax exceeds the enumeration budget");

    double zeta = 0.0;
    const bool anchored = detect_anchor(game, zeta);
    if (!anchored)
        err << "warning: game is not anchored; decay bound column is vacuous\n";

    std::ostringstream csv;
    csv << "k,classical_value,entangled_lb,dim,restarts,seed,theorem_bound_C\n";
    double v1 = 0.0;
    double prev_classical = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        Game gk = repeat_game(game, k);
        const double classical = classical_value_exact(gk).value;
        SeesawResult res =
            entangled_value_seesaw(gk, f.dim, f.restarts, f.iters, f.tol, f.seed);
        if (k == 1) v1 = res.value;
        const double floor_bound = std::pow(v1, k);
        const double entangled_lb = std::max(res.value, floor_bound);

        require(classical <= prev_classical + 1e-12, "NUMERIC_CHECK_FAILED",
                "classical value increased with k");
        prev_classical = classical;
        require(entangled_lb >= floor_bound - 1e-6 && entangled_lb <= 1.0 + 1e-12 &&
                    classical >= 0.0 && classical <= 1.0 + 1e-12,
                "NUMERIC_CHECK_FAILED", "decay row out of range");

        // Zero anchor weight makes the exponent vanish, so the bound column
        // degenerates to 1; the bound routine itself rejects zeta = 0.
        double bound = 1.0;
        if (zeta > 0.0) {
            TheoremParams tp;
            tp.omega = v1;
            tp.zeta = zeta;
            tp.k = static_cast<double>(k);
            tp.a_size = static_cast<double>(game.a_alphabet.size());
            tp.b_size = static_cast<double>(game.b_alphabet.size());
            tp.C = C;
            bound = theorem_bound(TheoremKind::par_rep, tp);
        }

        csv << k << "," << num(classical) << "," << num(entangled_lb) << "," << f.dim
            << "," << f.restarts << "," << f.seed << "," << num(bound) << "\n";
    }
    out << csv.str();
    if (!out_path.empty()) write_text(out_path, csv.str());
    return 0;
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"anchored non-local game laboratory"};
    app.require_subcommand(1);

    std::string game_path, out_path;
    std::string mode = "classical", side = "y", suite = "all";
    double zeta = 0.0, constant = 1.0;
    int k = 1, kmax = 1;
    std::size_t trials = 100;
    SeesawFlags sf;

    CLI::App* value = app.add_subcommand("value", "compute a game value");
    value->add_option("--game", game_path, "game JSON path")->required();
    value->add_option("--mode", mode, "classical | entangled")
        ->check(CLI::IsMember({"classical", "entangled"}));
    add_seesaw_flags(value, sf);
    value->add_option("--out", out_path, "machine-readable output path");

    CLI::App* anchor = app.add_subcommand("anchor", "mix an anchor input into a game");
    anchor->add_option("--game", game_path, "game JSON path")->required();
    anchor->add_option("--side", side, "x | y | both")
        ->check(CLI::IsMember({"x", "y", "both"}));
    anchor->add_option("--zeta", zeta, "anchor weight in [0,1)");
    anchor->add_option("--out", out_path, "anchored game output path");

    CLI::App* repeat = app.add_subcommand("repeat", "parallel-repeat a game");
    repeat->add_option("--game", game_path, "game JSON path")->required();
    repeat->add_option("-k", k, "number of copies")->required();
    repeat->add_option("--out", out_path, "repeated game output path");

    CLI::App* breaker =
        app.add_subcommand("breaker", "build the dependency-breaking joint");
    breaker->add_option("--game", game_path, "game JSON path")->required();
    breaker->add_option("--zeta", zeta, "anchor weight (fallback if unanchored)");
    breaker->add_option("--out", out_path, "joint output path");

    CLI::App* verify = app.add_subcommand("verify", "run the randomized fact battery");
    verify->add_option("--suite", suite, "classical | quantum | breaker | all")
        ->check(CLI::IsMember({"classical", "quantum", "breaker", "all"}));
    verify->add_option("--trials", trials, "trials per fact");
    verify->add_option("--seed", sf.seed, "battery seed");
    verify->add_option("--out", out_path, "report JSON path");

    CLI::App* decay = app.add_subcommand("decay", "value decay under repetition");
    decay->add_option("--game", game_path, "game JSON path")->required();
    decay->add_option("--kmax", kmax, "largest repetition count")->required();
    add_seesaw_flags(decay, sf);
    decay->add_option("--constant", constant, "constant for the bound column");
    decay->add_option("--out", out_path, "CSV output path");

    std::vector<const char*> argv;
    argv.push_back("anchorlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (value->parsed()) return run_value(game_path, mode, sf, out_path, out);
        if (anchor->parsed()) return run_anchor(game_path, side, zeta, out_path, out);
        if (repeat->parsed()) return run_repeat(game_path, k, out_path, out);
        if (breaker->parsed()) return run_breaker(game_path, zeta, out_path, out);
        if (verify->parsed())
            return run_verify(suite, trials, sf.seed, out_path, out);
        if (decay->parsed())
            return run_decay(game_path, kmax, sf, constant, out_path, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_run(args, std::cout, std::cerr);
}

} // namespace anchorlab
