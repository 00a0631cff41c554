#include "anchorlab/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace anchorlab {

namespace {

void check_alphabet(const std::vector<std::string>& alphabet, const char* which) {
    require(!alphabet.empty(), "EMPTY_ALPHABET", std::string(which) + " alphabet empty");
    std::set<std::string> seen(alphabet.begin(), alphabet.end());
    require(seen.size() == alphabet.size(), "EMPTY_ALPHABET",
            std::string(which) + " alphabet has duplicate labels");
}

std::size_t label_pos(const std::vector<std::string>& alphabet, const std::string& label,
                      const char* code) {
    auto it = std::find(alphabet.begin(), alphabet.end(), label);
    require(it != alphabet.end(), code, "unknown label: " + label);
    return static_cast<std::size_t>(it - alphabet.begin());
}

FiniteDistribution input_table(const std::vector<std::string>& x,
                               const std::vector<std::string>& y,
                               std::vector<double> flat) {
    try {
        return FiniteDistribution::from_table({{"x", x}, {"y", y}}, std::move(flat));
    } catch (const Error&) {
        fail("BAD_DISTRIBUTION", "input table invalid");
    }
}

// Anchor one side; `on_x` flips the roles.
Game anchor_one_side(const Game& game, double zeta, const std::string& label,
                     bool on_x) {
    const auto& grow = on_x ? game.x_alphabet : game.y_alphabet;
    require(std::find(grow.begin(), grow.end(), label) == grow.end(),
            "LABEL_COLLISION", "anchor label already present: " + label);

    std::vector<std::string> ext = grow;
    ext.push_back(label);
    const std::size_t nx = game.x_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();

    Game out;
    out.x_alphabet = on_x ? ext : game.x_alphabet;
    out.y_alphabet = on_x ? game.y_alphabet : ext;
    out.a_alphabet = game.a_alphabet;
    out.b_alphabet = game.b_alphabet;

    const std::size_t new_nx = out.x_alphabet.size();
    const std::size_t new_ny = out.y_alphabet.size();
    std::vector<double> weights(new_nx * new_ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
            weights[x * new_ny + y] = (1.0 - zeta) * game.input_weight(x, y);
    if (on_x) {
        // q(x*, y) = zeta * q_Y(y)
        for (std::size_t y = 0; y < ny; ++y) {
            double mass = 0.0;
            for (std::size_t x = 0; x < nx; ++x) mass += game.input_weight(x, y);
            weights[nx * new_ny + y] = zeta * mass;
        }
    } else {
        // q(x, y*) = zeta * q_X(x)
        for (std::size_t x = 0; x < nx; ++x) {
            double mass = 0.0;
            for (std::size_t y = 0; y < ny; ++y) mass += game.input_weight(x, y);
            weights[x * new_ny + ny] = zeta * mass;
        }
    }
    out.q = input_table(out.x_alphabet, out.y_alphabet, std::move(weights));

    const std::size_t na = game.a_alphabet.size();
    const std::size_t nb = game.b_alphabet.size();
    out.predicate.assign(new_nx * new_ny * na * nb, 0);
    for (std::size_t x = 0; x < new_nx; ++x)
        for (std::size_t y = 0; y < new_ny; ++y) {
            bool anchored = on_x ? (x == nx) : (y == ny);
            for (std::size_t a = 0; a < na; ++a)
                for (std::size_t b = 0; b < nb; ++b)
                    out.predicate[((x * new_ny + y) * na + a) * nb + b] =
                        anchored ? 1 : static_cast<std::uint8_t>(game.wins(x, y, a, b));
        }
    return out;
}

} // namespace

Game validate_game(const GameDraft& draft) {
    check_alphabet(draft.x, "x");
    check_alphabet(draft.y, "y");
    check_alphabet(draft.a, "a");
    check_alphabet(draft.b, "b");

    require(draft.q.size() == draft.x.size(), "BAD_DISTRIBUTION",
            "input table needs one row per x label");
    std::vector<double> flat;
    for (const auto& row : draft.q) {
        require(row.size() == draft.y.size(), "BAD_DISTRIBUTION",
                "input table row length differs from the y alphabet");
        flat.insert(flat.end(), row.begin(), row.end());
    }

    Game out;
    out.x_alphabet = draft.x;
    out.y_alphabet = draft.y;
    out.a_alphabet = draft.a;
    out.b_alphabet = draft.b;
    out.q = input_table(draft.x, draft.y, std::move(flat));

    const std::size_t total =
        draft.x.size() * draft.y.size() * draft.a.size() * draft.b.size();
    std::vector<int> seen(total, -1);
    for (const auto& e : draft.predicate) {
        std::size_t x = label_pos(draft.x, e.x, "PREDICATE_SHAPE");
        std::size_t y = label_pos(draft.y, e.y, "PREDICATE_SHAPE");
        std::size_t a = label_pos(draft.a, e.a, "PREDICATE_SHAPE");
        std::size_t b = label_pos(draft.b, e.b, "PREDICATE_SHAPE");
        std::size_t idx =
            ((x * draft.y.size() + y) * draft.a.size() + a) * draft.b.size() + b;
        require(seen[idx] < 0, "PREDICATE_SHAPE", "duplicate predicate entry");
        seen[idx] = e.accept ? 1 : 0;
    }
    out.predicate.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        require(seen[i] >= 0, "PREDICATE_SHAPE", "predicate is missing a tuple");
        out.predicate[i] = static_cast<std::uint8_t>(seen[i]);
    }
    return out;
}

Game build_game(std::vector<std::string> x, std::vector<std::string> y,
                std::vector<std::string> a, std::vector<std::string> b,
                std::vector<double> q_flat,
                const std::function<bool(std::size_t, std::size_t, std::size_t,
                                         std::size_t)>& wins) {
    GameDraft draft;
    draft.x = std::move(x);
    draft.y = std::move(y);
    draft.a = std::move(a);
    draft.b = std::move(b);
    draft.q.resize(draft.x.size());
    for (std::size_t i = 0; i < draft.x.size(); ++i)
        draft.q[i].assign(q_flat.begin() + static_cast<std::ptrdiff_t>(i * draft.y.size()),
                          q_flat.begin() +
                              static_cast<std::ptrdiff_t>((i + 1) * draft.y.size()));
    for (std::size_t xi = 0; xi < draft.x.size(); ++xi)
        for (std::size_t yi = 0; yi < draft.y.size(); ++yi)
            for (std::size_t ai = 0; ai < draft.a.size(); ++ai)
                for (std::size_t bi = 0; bi < draft.b.size(); ++bi)
                    draft.predicate.push_back({draft.x[xi], draft.y[yi], draft.a[ai],
                                               draft.b[bi], wins(xi, yi, ai, bi)});
    return validate_game(draft);
}

Game chsh_game() {
    std::vector<std::string> bits = {"0", "1"};
    return build_game(bits, bits, bits, bits, {0.25, 0.25, 0.25, 0.25},
                      [](std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
                          return ((a + b) % 2) == (x & y);
                      });
}

ClassicalValue classical_value_exact(const Game& game) {
    const std::size_t nx = game.x_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();
    const std::size_t na = game.a_alphabet.size();
    const std::size_t nb = game.b_alphabet.size();
    double log_pairs = static_cast<double>(nx) * std::log2(static_cast<double>(na)) +
                       static_cast<double>(ny) * std::log2(static_cast<double>(nb));
    require(log_pairs <= std::log2(1e8), "ENUMERATION_GUARD",
            "deterministic strategy space exceeds 1e8 pairs");

    // For each assignment g the best response h decomposes per y, so the
    // search is |A|^|X| times a cheap inner sweep yet still exact.
    std::vector<std::size_t> g(nx, 0);
    ClassicalValue best;
    best.value = -1.0;
    while (true) {
        double value = 0.0;
        std::vector<std::size_t> h(ny, 0);
        for (std::size_t y = 0; y < ny; ++y) {
            double top = -1.0;
            for (std::size_t b = 0; b < nb; ++b) {
                double s = 0.0;
                for (std::size_t x = 0; x < nx; ++x)
                    if (game.wins(x, y, g[x], b)) s += game.input_weight(x, y);
                if (s > top) {
                    top = s;
                    h[y] = b;
                }
            }
            value += top;
        }
        if (value > best.value) {
            best.value = value;
            best.strategy = {g, h};
        }
        // odometer over g
        std::size_t pos = nx;
        while (pos > 0) {
            --pos;
            if (++g[pos] < na) break;
            g[pos] = 0;
            if (pos == 0) return best;
        }
    }
}

double strategy_value(const Game& game, const DeterministicStrategy& s) {
    const std::size_t nx = game.x_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();
    require(s.g.size() == nx && s.h.size() == ny, "SHAPE_MISMATCH",
            "strategy tables do not match the alphabets");
    double value = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        require(s.g[x] < game.a_alphabet.size(), "SHAPE_MISMATCH",
                "answer index out of range");
        for (std::size_t y = 0; y < ny; ++y) {
            require(s.h[y] < game.b_alphabet.size(), "SHAPE_MISMATCH",
                    "answer index out of range");
            if (game.wins(x, y, s.g[x], s.h[y])) value += game.input_weight(x, y);
        }
    }
    return value;
}

double strategy_value(const Game& game, const EntangledStrategy& s) {
    const std::size_t nx = game.x_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();
    const std::size_t na = game.a_alphabet.size();
    const std::size_t nb = game.b_alphabet.size();
    require(s.alice.size() == nx && s.bob.size() == ny, "SHAPE_MISMATCH",
            "one measurement per input required");
    require(s.state.space.dim() == s.d * s.d, "SHAPE_MISMATCH",
            "shared state dimension must be d*d");
    for (const auto& m : s.alice)
        require(m.elements.size() == na && m.space.dim() == s.d, "SHAPE_MISMATCH",
                "first player's measurement shape is wrong");
    for (const auto& m : s.bob)
        require(m.elements.size() == nb && m.space.dim() == s.d, "SHAPE_MISMATCH",
                "second player's measurement shape is wrong");

    Mat rho = s.state.vector * s.state.vector.adjoint();
    double value = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            double w = game.input_weight(x, y);
            if (w <= 0.0) continue;
            Mat win_op = Mat::Zero(s.d * s.d, s.d * s.d);
            for (std::size_t a = 0; a < na; ++a)
                for (std::size_t b = 0; b < nb; ++b)
                    if (game.wins(x, y, a, b))
                        win_op += kron(s.alice[x].elements[a], s.bob[y].elements[b]);
            value += w * (win_op * rho).trace().real();
        }
    return std::min(1.0, std::max(0.0, value));
}

Game anchor_game(const Game& game, const AnchorSpec& spec) {
    require(spec.side == "x" || spec.side == "y" || spec.side == "both",
            "PARAM_RANGE", "side must be x, y or both");
    require(spec.zeta >= 0.0 && spec.zeta < 1.0, "PARAM_RANGE",
            "zeta must lie in [0,1)");
    if (spec.side == "x") return anchor_one_side(game, spec.zeta, spec.x_label, true);
    if (spec.side == "y") return anchor_one_side(game, spec.zeta, spec.y_label, false);
    Game mid = anchor_one_side(game, spec.zeta, spec.x_label, true);
    return anchor_one_side(mid, spec.zeta, spec.y_label, false);
}

Game repeat_game(const Game& game, int k) {
    require(k >= 1, "PARAM_RANGE", "k must be at least 1");
    const std::size_t nx = game.x_alphabet.size();
    const std::size_t ny = game.y_alphabet.size();
    const std::size_t na = game.a_alphabet.size();
    const std::size_t nb = game.b_alphabet.size();
    double cells = std::pow(static_cast<double>(nx * ny * na * nb),
                            static_cast<double>(k));
    require(cells <= 1e8, "SIZE_GUARD", "repeated predicate table exceeds 1e8 cells");

    auto power_labels = [k](const std::vector<std::string>& base) {
        std::vector<std::string> out = {""};
        for (int i = 0; i < k; ++i) {
            std::vector<std::string> next;
            next.reserve(out.size() * base.size());
            for (const auto& prefix : out)
                for (const auto& l : base)
                    next.push_back(i == 0 ? l : prefix + "," + l);
            out = std::move(next);
        }
        return out;
    };

    Game out;
    out.x_alphabet = power_labels(game.x_alphabet);
    out.y_alphabet = power_labels(game.y_alphabet);
    out.a_alphabet = power_labels(game.a_alphabet);
    out.b_alphabet = power_labels(game.b_alphabet);

    const std::size_t rnx = out.x_alphabet.size();
    const std::size_t rny = out.y_alphabet.size();
    const std::size_t rna = out.a_alphabet.size();
    const std::size_t rnb = out.b_alphabet.size();

    auto digits = [k](std::size_t flat, std::size_t base) {
        std::vector<std::size_t> d(static_cast<std::size_t>(k));
        for (int i = k - 1; i >= 0; --i) {
            d[static_cast<std::size_t>(i)] = flat % base;
            flat /= base;
        }
        return d;
    };

    std::vector<double> weights(rnx * rny, 0.0);
    for (std::size_t x = 0; x < rnx; ++x) {
        auto xs = digits(x, nx);
        for (std::size_t y = 0; y < rny; ++y) {
            auto ys = digits(y, ny);
            double w = 1.0;
            for (int i = 0; i < k; ++i)
                w *= game.input_weight(xs[static_cast<std::size_t>(i)],
                                       ys[static_cast<std::size_t>(i)]);
            weights[x * rny + y] = w;
        }
    }
    out.q = input_table(out.x_alphabet, out.y_alphabet, std::move(weights));

    out.predicate.assign(rnx * rny * rna * rnb, 0);
    for (std::size_t x = 0; x < rnx; ++x) {
        auto xs = digits(x, nx);
        for (std::size_t y = 0; y < rny; ++y) {
            auto ys = digits(y, ny);
            for (std::size_t a = 0; a < rna; ++a) {
                auto as = digits(a, na);
                for (std::size_t b = 0; b < rnb; ++b) {
                    auto bs = digits(b, nb);
                    bool win = true;
                    for (int i = 0; win && i < k; ++i) {
                        auto u = static_cast<std::size_t>(i);
                        win = game.wins(xs[u], ys[u], as[u], bs[u]);
                    }
                    out.predicate[((x * rny + y) * rna + a) * rnb + b] = win ? 1 : 0;
                }
            }
        }
    }
    return out;
}

double theorem_bound(TheoremKind which, const TheoremParams& p) {
    require(p.C > 0.0 && p.k >= 0.0 && p.zeta > 0.0 && p.zeta < 1.0, "PARAM_RANGE",
            "need C > 0, k >= 0 and zeta in (0,1)");
    if (which == TheoremKind::par_rep) {
        require(p.omega >= 0.0 && p.omega <= 1.0 && p.a_size >= 2.0 && p.b_size >= 2.0,
                "PARAM_RANGE", "need omega in [0,1] and alphabet sizes >= 2");
        double base = 1.0 - std::pow(1.0 - p.omega, 5.0);
        double exponent =
            p.C * p.zeta * p.zeta * p.k / std::log2(p.a_size * p.b_size);
        return std::pow(base, exponent);
    }
    require(p.eps >= 0.0 && p.eps <= 1.0 && p.z_size >= 2.0, "PARAM_RANGE",
            "need eps in [0,1] and |Z| >= 2");
    double exponent = p.C * std::pow(p.zeta, 6.0) * p.k / std::log2(p.z_size);
    return 1.0 - std::pow(1.0 - p.eps, exponent);
}

nlohmann::ordered_json Game::to_json() const {
    nlohmann::ordered_json j;
    j["x"] = x_alphabet;
    j["y"] = y_alphabet;
    j["a"] = a_alphabet;
    j["b"] = b_alphabet;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < x_alphabet.size(); ++x) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t y = 0; y < y_alphabet.size(); ++y)
            row.push_back(input_weight(x, y));
        rows.push_back(std::move(row));
    }
    j["q"] = std::move(rows);
    nlohmann::ordered_json win = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < x_alphabet.size(); ++x)
        for (std::size_t y = 0; y < y_alphabet.size(); ++y)
            for (std::size_t a = 0; a < a_alphabet.size(); ++a)
                for (std::size_t b = 0; b < b_alphabet.size(); ++b)
                    if (wins(x, y, a, b))
                        win.push_back({x_alphabet[x], y_alphabet[y], a_alphabet[a],
                                       b_alphabet[b]});
    j["win"] = std::move(win);
    return j;
}

Game Game::from_json(const nlohmann::json& j) {
    GameDraft draft;
    draft.x = j.at("x").get<std::vector<std::string>>();
    draft.y = j.at("y").get<std::vector<std::string>>();
    draft.a = j.at("a").get<std::vector<std::string>>();
    draft.b = j.at("b").get<std::vector<std::string>>();
    draft.q = j.at("q").get<std::vector<std::vector<double>>>();

    std::set<std::vector<std::string>> accepted;
    for (const auto& t : j.at("win")) {
        require(t.is_array() && t.size() == 4, "PREDICATE_SHAPE",
                "win entries must be [x,y,a,b] label tuples");
        accepted.insert(t.get<std::vector<std::string>>());
    }
    for (const auto& x : draft.x)
        for (const auto& y : draft.y)
            for (const auto& a : draft.a)
                for (const auto& b : draft.b)
                    draft.predicate.push_back(
                        {x, y, a, b, accepted.count({x, y, a, b}) > 0});
    // Reject win tuples that name labels outside the alphabets.
    for (const auto& t : accepted) {
        label_pos(draft.x, t[0], "PREDICATE_SHAPE");
        label_pos(draft.y, t[1], "PREDICATE_SHAPE");
        label_pos(draft.a, t[2], "PREDICATE_SHAPE");
        label_pos(draft.b, t[3], "PREDICATE_SHAPE");
    }
    return validate_game(draft);
}

} // namespace anchorlab
