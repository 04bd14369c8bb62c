#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "cqm/closed_form.hpp"
#include "cqm/errors.hpp"
#include "cqm/experiments/fit.hpp"
#include "cqm/experiments/runner.hpp"
#include "cqm/fock/oracle.hpp"
#include "cqm/lindblad.hpp"
#include "cqm/model.hpp"

namespace cqm::experiments {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) { return format_number(v); }
std::string num(int v) { return format_number(v); }

bool uses_closed(Engine e) { return e != Engine::oracle; }
bool uses_oracle(Engine e) { return e != Engine::closed; }

// (closed - oracle) / |oracle|, zero when both agree exactly
double rel_dev(double closed, double oracle) {
    if (closed == oracle) {
        return 0.0;
    }
    return (closed - oracle) / std::abs(oracle);
}

std::vector<KeySpec> with_oracle_keys(std::vector<KeySpec> keys) {
    keys.push_back({"n_cut_start", "32", "first Fock cutoff tried by the oracle"});
    keys.push_back({"n_cut_max", "8192", "largest Fock cutoff before a cell fails"});
    keys.push_back({"cutoff_tolerance", "1e-6",
                    "relative change allowed between consecutive cutoffs"});
    return keys;
}

fock::CutoffPolicy cutoff_policy(const ExperimentConfig& c) {
    fock::CutoffPolicy p;
    p.start = c.integer("n_cut_start");
    p.max = c.integer("n_cut_max");
    p.tolerance = c.number("cutoff_tolerance");
    if (p.start < 4 || p.max < p.start || !(p.tolerance > 0.0)) {
        throw ConfigError("cutoff policy needs 4 <= n_cut_start <= n_cut_max and tolerance > 0");
    }
    return p;
}

ModelParams make_params(double omega, double lambda, double g, double Omega = 1.0) {
    ModelParams p;
    p.omega = omega;
    p.Omega = Omega;
    p.g = g;
    p.lambda = lambda;
    return validate(p);
}

std::vector<double> require_list(const ExperimentConfig& c, const std::string& key) {
    auto v = c.list(key);
    if (v.empty()) {
        throw ConfigError("key '" + key + "' must not be empty");
    }
    return v;
}

std::vector<std::pair<double, double>> lambda_g_pairs(const ExperimentConfig& c) {
    const auto lambdas = require_list(c, "lambda");
    const auto gs = require_list(c, "g");
    if (lambdas.size() != gs.size()) {
        throw ConfigError("keys 'lambda' and 'g' are paired and need equal lengths");
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        out.emplace_back(lambdas[i], gs[i]);
    }
    return out;
}

std::vector<Column> columns_for(std::vector<Column> keys, Engine engine,
                                const std::vector<std::pair<std::string, std::string>>& closed,
                                const std::vector<std::pair<std::string, std::string>>& oracle,
                                const std::vector<std::string>& deviations) {
    if (uses_closed(engine)) {
        for (const auto& [name, unit] : closed) {
            keys.push_back({name, unit});
        }
    }
    if (uses_oracle(engine)) {
        for (const auto& [name, unit] : oracle) {
            keys.push_back({name, unit});
        }
    }
    if (engine == Engine::both) {
        for (const auto& name : deviations) {
            keys.push_back({name, "1"});
        }
    }
    return keys;
}

// Rows grouped by the value of a key column, in first-appearance order.
std::vector<std::pair<double, std::vector<const Row*>>> group_rows(const Dataset& d,
                                                                   const std::string& key) {
    const auto idx = d.column_index(key);
    std::vector<std::pair<double, std::vector<const Row*>>> out;
    for (const auto& r : d.rows()) {
        const double v = std::strtod(r.values[idx].c_str(), nullptr);
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == v; });
        if (it == out.end()) {
            out.push_back({v, {&r}});
        } else {
            it->second.push_back(&r);
        }
    }
    return out;
}

// Rows grouped by their (lambda, g) pair, in first-appearance order.
std::vector<std::vector<const Row*>> group_by_pair(const Dataset& d) {
    const auto li = d.column_index("lambda");
    const auto gi = d.column_index("g");
    std::vector<std::pair<std::string, std::string>> keys;
    std::vector<std::vector<const Row*>> out;
    for (const auto& r : d.rows()) {
        const std::pair key{r.values[li], r.values[gi]};
        const auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            out.push_back({&r});
        } else {
            out[static_cast<std::size_t>(it - keys.begin())].push_back(&r);
        }
    }
    return out;
}

double value_of(const Dataset& d, const Row& r, const std::string& column) {
    return std::strtod(r.values[d.column_index(column)].c_str(), nullptr);
}

// Closed-form QFI at time t in whichever regime g falls.
double qfi_any_regime(const ModelParams& p, double t, const BosonInitialState& state) {
    const auto osc = effective_oscillator(p);
    if (osc.regime == Regime::Normal) {
        return qfi_g(p, t, var_n(state, p)).value;
    }
    return qfi_g_beyond(p, t, var_n_beyond(state, p)).value;
}

// ---------------------------------------------------------------- qfi-evolution

Plan plan_qfi_evolution(const ExperimentConfig& c) {
    const auto engine = c.engine();
    const double omega = c.number("omega");
    const double lambda = c.number("lambda");
    const auto gs = require_list(c, "g");
    const auto ts = require_list(c, "t");
    const auto policy = uses_oracle(engine) ? cutoff_policy(c) : fock::CutoffPolicy{};

    Plan plan;
    plan.columns = columns_for({{"lambda", "omega"}, {"g", "1"}, {"t", "1/omega"}}, engine,
                               {{"F_closed", "1"}}, {{"F_oracle", "1"}, {"n_cut", "1"}},
                               {"rel_dev"});
    for (double g : gs) {
        const auto p = make_params(omega, lambda, g);
        Cell cell;
        cell.keys = {num(lambda), num(g)};
        cell.compute = [=] {
            const auto state = BosonInitialState::superposition_01();
            std::vector<double> closed;
            if (uses_closed(engine)) {
                for (double t : ts) {
                    closed.push_back(qfi_g(p, t, var_n(state, p)).value);
                }
            }
            fock::ConvergedSeries oracle;
            if (uses_oracle(engine)) {
                oracle = fock::generator_qfi_converged(p, ts, state, policy);
            }
            std::vector<Row> rows;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                Row r;
                r.values = {num(lambda), num(g), num(ts[i])};
                if (uses_closed(engine)) {
                    r.values.push_back(num(closed[i]));
                }
                if (uses_oracle(engine)) {
                    r.values.push_back(num(oracle.values[i]));
                    r.values.push_back(num(oracle.n_cut));
                }
                if (engine == Engine::both) {
                    r.values.push_back(num(rel_dev(closed[i], oracle.values[i])));
                }
                rows.push_back(std::move(r));
            }
            return rows;
        };
        plan.cells.push_back(std::move(cell));
    }
    plan.analyze = [engine](const Dataset& d, Json& a) {
        const std::string col = uses_oracle(engine) ? "F_oracle" : "F_closed";
        // at every t > 0 a larger g (closer to g_c) must give a larger F
        bool ordered = true;
        for (const auto& [t, rows] : group_rows(d, "t")) {
            if (t <= 0.0) {
                continue;
            }
            std::vector<std::pair<double, double>> gf;
            for (const Row* r : rows) {
                if (r->status == CellStatus::ok) {
                    gf.emplace_back(value_of(d, *r, "g"), value_of(d, *r, col));
                }
            }
            std::sort(gf.begin(), gf.end());
            for (std::size_t i = 1; i < gf.size(); ++i) {
                ordered = ordered && gf[i].second > gf[i - 1].second;
            }
        }
        a["ordered_by_g"] = ordered;
        if (engine == Engine::both) {
            Json finals = Json::array();
            for (const auto& [g, rows] : group_rows(d, "g")) {
                const Row* last = rows.back();
                if (last->status == CellStatus::ok) {
                    finals.push_back({{"g", g},
                                      {"t", value_of(d, *last, "t")},
                                      {"rel_dev", value_of(d, *last, "rel_dev")}});
                }
            }
            a["final_rel_dev"] = finals;
        }
    };
    return plan;
}

// ---------------------------------------------------------------- qfi-vs-g

Plan plan_qfi_vs_g(const ExperimentConfig& c) {
    const double omega = c.number("omega");
    const auto lambdas = require_list(c, "lambda");
    const auto gs = require_list(c, "g");
    const double t = c.number("t");

    Plan plan;
    plan.columns = {{"lambda", "omega"}, {"g", "1"},       {"g_c", "1"},      {"regime", "1"},
                    {"stiffness", "1"},  {"F_closed", "1"}, {"log10_F", "1"}};
    for (double lambda : lambdas) {
        for (double g : gs) {
            const auto p = make_params(omega, lambda, g);
            Cell cell;
            cell.keys = {num(lambda), num(g)};
            cell.compute = [=] {
                const auto osc = effective_oscillator(p);
                Row r;
                r.values = {num(lambda), num(g), num(critical_coupling(p)),
                            std::string(to_string(osc.regime))};
                if (osc.regime == Regime::Critical) {
                    const double inf = std::numeric_limits<double>::infinity();
                    r.values.insert(r.values.end(), {num(0.0), num(inf), num(inf)});
                    r.status = CellStatus::saturated;
                    return std::vector<Row>{r};
                }
                const double stiffness = osc.regime == Regime::Normal
                                             ? osc.epsilon_g
                                             : beyond_critical_frame(p).epsilon_g_alpha;
                const double f = qfi_any_regime(p, t, BosonInitialState::superposition_01());
                r.values.insert(r.values.end(), {num(stiffness), num(f), num(std::log10(f))});
                if (!std::isfinite(f)) {
                    r.status = CellStatus::saturated;
                }
                return std::vector<Row>{r};
            };
            plan.cells.push_back(std::move(cell));
        }
    }
    double spacing = std::numeric_limits<double>::infinity();
    auto sorted = gs;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] > sorted[i - 1]) {
            spacing = std::min(spacing, sorted[i] - sorted[i - 1]);
        }
    }
    plan.analyze = [spacing](const Dataset& d, Json& a) {
        Json peaks = Json::array();
        for (const auto& [lambda, rows] : group_rows(d, "lambda")) {
            const Row* best = nullptr;
            double best_f = -std::numeric_limits<double>::infinity();
            for (const Row* r : rows) {
                if (r->status == CellStatus::failed) {
                    continue;
                }
                const double f = value_of(d, *r, "F_closed");
                if (f > best_f) {
                    best_f = f;
                    best = r;
                }
            }
            if (best == nullptr) {
                continue;
            }
            const double g_peak = value_of(d, *best, "g");
            const double g_c = value_of(d, *best, "g_c");
            peaks.push_back({{"lambda", lambda},
                             {"g_peak", g_peak},
                             {"g_c", g_c},
                             {"offset_cells", std::abs(g_peak - g_c) / spacing}});
        }
        a["peaks"] = peaks;
    };
    return plan;
}

// ---------------------------------------------------------------- qfi-map

Plan plan_qfi_map(const ExperimentConfig& c) {
    const double omega = c.number("omega");
    const auto lambdas = require_list(c, "lambda");
    const auto gs = require_list(c, "g");
    const double t = c.number("t");
    if (lambdas.size() > 512 || gs.size() > 512) {
        throw ConfigError("qfi-map grids are limited to 512 x 512");
    }
    for (double lambda : lambdas) {
        make_params(omega, lambda, 1.0);
    }
    Plan plan;
    plan.columns = {{"lambda", "omega"}, {"g", "1"}, {"g_c", "1"}, {"log10_F", "1"}};
    for (double lambda : lambdas) {
        Cell cell;
        cell.keys = {num(lambda)};
        cell.compute = [=] {
            const auto state = BosonInitialState::superposition_01();
            std::vector<Row> rows;
            for (double g : gs) {
                const auto p = make_params(omega, lambda, g);
                Row r;
                r.values = {num(lambda), num(g), num(critical_coupling(p))};
                double log_f = std::numeric_limits<double>::infinity();
                if (effective_oscillator(p).regime != Regime::Critical) {
                    log_f = std::log10(qfi_any_regime(p, t, state));
                }
                r.values.push_back(num(log_f));
                if (!std::isfinite(log_f)) {
                    r.status = CellStatus::saturated;
                }
                rows.push_back(std::move(r));
            }
            return rows;
        };
        plan.cells.push_back(std::move(cell));
    }
    plan.analyze = [gs](const Dataset& d, Json& a) {
        // ridge: per lambda row, the argmax cell against the cell nearest g_c
        int worst = 0;
        Json rows_json = Json::array();
        for (const auto& [lambda, rows] : group_rows(d, "lambda")) {
            if (rows.size() != gs.size() || rows.front()->status == CellStatus::failed) {
                continue;
            }
            const double g_c = value_of(d, *rows.front(), "g_c");
            if (g_c < gs.front() || g_c > gs.back()) {
                continue;
            }
            std::size_t arg = 0;
            double best = -std::numeric_limits<double>::infinity();
            std::size_t nearest = 0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const double v = value_of(d, *rows[i], "log10_F");
                if (v > best) {
                    best = v;
                    arg = i;
                }
                if (std::abs(gs[i] - g_c) < std::abs(gs[nearest] - g_c)) {
                    nearest = i;
                }
            }
            const int offset = std::abs(static_cast<int>(arg) - static_cast<int>(nearest));
            worst = std::max(worst, offset);
            rows_json.push_back({{"lambda", lambda}, {"g_peak", gs[arg]}, {"g_c", g_c},
                                 {"offset_cells", offset}});
        }
        a["ridge_max_offset_cells"] = worst;
        a["ridge_within_one_cell"] = worst <= 1;
        a["ridge"] = rows_json;
    };
    return plan;
}

// ---------------------------------------------------------------- quadrature-vs-g

Plan plan_quadrature_vs_g(const ExperimentConfig& c) {
    const auto engine = c.engine();
    const double omega = c.number("omega");
    const auto lambdas = require_list(c, "lambda");
    const auto gs = require_list(c, "g");
    const double t = c.number("t");
    const auto policy = uses_oracle(engine) ? cutoff_policy(c) : fock::CutoffPolicy{};

    Plan plan;
    plan.columns = columns_for(
        {{"lambda", "omega"}, {"g", "1"}, {"regime", "1"}, {"t", "1/omega"}}, engine,
        {{"x_mean_closed", "1"}, {"x_deriv_g_closed", "1"}, {"x_var_closed", "1"},
         {"inv_var_closed", "1"}},
        {{"x_mean_oracle", "1"}, {"x_deriv_g_oracle", "1"}, {"x_var_oracle", "1"},
         {"inv_var_oracle", "1"}, {"n_cut", "1"}},
        {"rel_dev_x_mean", "rel_dev_inv_var"});
    const auto width = plan.columns.size();
    for (double lambda : lambdas) {
        for (double g : gs) {
            const auto p = make_params(omega, lambda, g);
            Cell cell;
            cell.keys = {num(lambda), num(g)};
            cell.compute = [=] {
                const auto regime = effective_oscillator(p).regime;
                Row r;
                r.values = {num(lambda), num(g), std::string(to_string(regime)), num(t)};
                if (regime == Regime::Critical) {
                    r.values.resize(width, "nan");
                    r.status = CellStatus::saturated;
                    return std::vector<Row>{r};
                }
                QuadratureSample closed{};
                if (uses_closed(engine)) {
                    closed = regime == Regime::Normal ? quadrature_sample(p, t)
                                                      : quadrature_sample_beyond(p, t);
                    r.values.insert(r.values.end(), {num(closed.x_mean), num(closed.x_deriv_g),
                                                     num(closed.x_var), num(closed.inv_var)});
                }
                fock::QuadratureSeries oracle;
                if (uses_oracle(engine)) {
                    const double ts[] = {t};
                    oracle = fock::quadrature_series(fock::Frame::effective, p,
                                                     BosonInitialState::superposition_01(), ts,
                                                     policy);
                    r.values.insert(r.values.end(),
                                    {num(oracle.x_mean[0]), num(oracle.x_deriv_g[0]),
                                     num(oracle.x_var[0]), num(oracle.inv_var[0]),
                                     num(oracle.n_cut)});
                }
                if (engine == Engine::both) {
                    r.values.push_back(num(rel_dev(closed.x_mean, oracle.x_mean[0])));
                    r.values.push_back(num(rel_dev(closed.inv_var, oracle.inv_var[0])));
                }
                return std::vector<Row>{r};
            };
            plan.cells.push_back(std::move(cell));
        }
    }
    return plan;
}

// ---------------------------------------------------------------- inverted-variance

Plan plan_inverted_variance(const ExperimentConfig& c) {
    const auto engine = c.engine();
    const double omega = c.number("omega");
    const auto pairs = lambda_g_pairs(c);
    const int periods = c.integer("periods");
    const int points = c.integer("points");
    const auto etas = c.list("eta");
    if (periods < 1 || points < 2) {
        throw ConfigError("need periods >= 1 and points >= 2");
    }
    if (!etas.empty() && engine == Engine::closed) {
        throw ConfigError("finite-eta rows need the oracle engine");
    }
    for (double eta : etas) {
        if (!(eta >= 10.0)) {
            throw ConfigError("eta values must be >= 10");
        }
    }
    const auto policy = uses_oracle(engine) ? cutoff_policy(c) : fock::CutoffPolicy{};

    Plan plan;
    plan.columns = columns_for({{"lambda", "omega"}, {"g", "1"}, {"eta", "1"}, {"t", "1/omega"}},
                               engine, {{"inv_var_closed", "1"}},
                               {{"inv_var_oracle", "1"}, {"n_cut", "1"}}, {"rel_dev"});
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> eta_rows = {inf};
    eta_rows.insert(eta_rows.end(), etas.begin(), etas.end());
    for (const auto& [lambda, g] : pairs) {
        const auto p = make_params(omega, lambda, g);
        for (double eta : eta_rows) {
            Cell cell;
            cell.keys = {num(lambda), num(g), num(eta)};
            cell.compute = [=] {
                const double tau1 = optimal_times(p, 1).front();
                std::vector<double> ts;
                for (int i = 0; i < points; ++i) {
                    ts.push_back(periods * tau1 * i / (points - 1));
                }
                std::vector<double> closed;
                if (uses_closed(engine)) {
                    for (double t : ts) {
                        closed.push_back(inverted_variance(p, t));
                    }
                }
                fock::QuadratureSeries oracle;
                if (uses_oracle(engine)) {
                    const auto state = BosonInitialState::superposition_01();
                    oracle = std::isinf(eta)
                                 ? fock::quadrature_series(fock::Frame::effective, p, state, ts,
                                                           policy)
                                 : fock::quadrature_series(fock::Frame::squeezed,
                                                           p.with_Omega(eta * omega), state, ts,
                                                           policy);
                }
                std::vector<Row> rows;
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    Row r;
                    r.values = {num(lambda), num(g), num(eta), num(ts[i])};
                    if (uses_closed(engine)) {
                        r.values.push_back(num(closed[i]));
                    }
                    if (uses_oracle(engine)) {
                        r.values.push_back(num(oracle.inv_var[i]));
                        r.values.push_back(num(oracle.n_cut));
                    }
                    if (engine == Engine::both) {
                        r.values.push_back(num(rel_dev(closed[i], oracle.inv_var[i])));
                    }
                    rows.push_back(std::move(r));
                }
                return rows;
            };
            plan.cells.push_back(std::move(cell));
        }
    }
    plan.analyze = [engine, pairs, omega](const Dataset& d, Json& a) {
        Json peaks = Json::array();
        for (const auto& [lambda, g] : pairs) {
            const auto p = make_params(omega, lambda, g);
            peaks.push_back({{"lambda", lambda},
                             {"g", g},
                             {"tau_1", optimal_times(p, 1).front()},
                             {"peak_1", inverted_variance_peak(p, 1)}});
        }
        a["closed_form_peaks"] = peaks;
        if (engine == Engine::both) {
            // relative to each curve's scale; I_g passes through zero at t = 0
            double worst = 0.0;
            for (const auto& rows : group_by_pair(d)) {
                double diff = 0.0;
                double scale = 0.0;
                for (const Row* r : rows) {
                    if (r->status != CellStatus::ok || !std::isinf(value_of(d, *r, "eta"))) {
                        continue;
                    }
                    const double cl = value_of(d, *r, "inv_var_closed");
                    const double orc = value_of(d, *r, "inv_var_oracle");
                    diff = std::max(diff, std::abs(cl - orc));
                    scale = std::max(scale, std::abs(orc));
                }
                if (scale > 0.0) {
                    worst = std::max(worst, diff / scale);
                }
            }
            a["effective_sup_rel_dev"] = worst;
        }
    };
    return plan;
}

// ---------------------------------------------------------------- ratio-scaling

Plan plan_ratio_scaling(const ExperimentConfig& c) {
    const auto engine = c.engine();
    const double omega = c.number("omega");
    const auto pairs = lambda_g_pairs(c);
    const auto ns = c.int_list("n");
    if (ns.empty() || *std::min_element(ns.begin(), ns.end()) < 1) {
        throw ConfigError("key 'n' needs peak indices >= 1");
    }
    const auto policy = uses_oracle(engine) ? cutoff_policy(c) : fock::CutoffPolicy{};

    Plan plan;
    plan.columns = columns_for(
        {{"lambda", "omega"}, {"g", "1"}, {"n", "1"}, {"tau", "1/omega"},
         {"ratio_analytic", "1"}},
        engine, {{"I_closed", "1"}, {"F_closed", "1"}, {"ratio_closed", "1"}},
        {{"I_oracle", "1"}, {"F_oracle", "1"}, {"ratio_oracle", "1"}, {"n_cut", "1"}},
        {"rel_dev_ratio"});
    for (const auto& [lambda, g] : pairs) {
        const auto p = make_params(omega, lambda, g);
        Cell cell;
        cell.keys = {num(lambda), num(g)};
        cell.compute = [=] {
            const auto state = BosonInitialState::superposition_01();
            const int n_max = *std::max_element(ns.begin(), ns.end());
            const auto all_taus = optimal_times(p, n_max);
            std::vector<double> taus;
            for (int n : ns) {
                taus.push_back(all_taus[static_cast<std::size_t>(n - 1)]);
            }
            const double analytic = ig_fg_ratio(state, p);
            fock::QuadratureSeries quad;
            fock::ConvergedSeries gen;
            if (uses_oracle(engine)) {
                quad = fock::quadrature_series(fock::Frame::effective, p, state, taus, policy);
                gen = fock::generator_qfi_converged(p, taus, state, policy);
            }
            std::vector<Row> rows;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                Row r;
                r.values = {num(lambda), num(g), num(ns[i]), num(taus[i]), num(analytic)};
                double ratio_closed = 0.0;
                if (uses_closed(engine)) {
                    const double ic = inverted_variance(p, taus[i]);
                    const double fc = qfi_g(p, taus[i], var_n(state, p)).value;
                    ratio_closed = ic / fc;
                    r.values.insert(r.values.end(), {num(ic), num(fc), num(ratio_closed)});
                }
                double ratio_oracle = 0.0;
                if (uses_oracle(engine)) {
                    ratio_oracle = quad.inv_var[i] / gen.values[i];
                    r.values.insert(r.values.end(),
                                    {num(quad.inv_var[i]), num(gen.values[i]), num(ratio_oracle),
                                     num(std::max(quad.n_cut, gen.n_cut))});
                }
                if (engine == Engine::both) {
                    r.values.push_back(num(rel_dev(ratio_closed, ratio_oracle)));
                }
                rows.push_back(std::move(r));
            }
            return rows;
        };
        plan.cells.push_back(std::move(cell));
    }
    plan.analyze = [engine](const Dataset& d, Json& a) {
        const std::string col = uses_oracle(engine) ? "ratio_oracle" : "ratio_closed";
        Json fits = Json::array();
        for (const auto& rows : group_by_pair(d)) {
            std::vector<double> n, ratio;
            double analytic = 0.0;
            double lambda = 0.0;
            double g = 0.0;
            for (const Row* r : rows) {
                if (r->status == CellStatus::ok) {
                    n.push_back(value_of(d, *r, "n"));
                    ratio.push_back(value_of(d, *r, col));
                    analytic = value_of(d, *r, "ratio_analytic");
                    lambda = value_of(d, *r, "lambda");
                    g = value_of(d, *r, "g");
                }
            }
            Json entry = {{"lambda", lambda}, {"g", g}, {"ratio_analytic", analytic}};
            if (n.size() >= 5) {
                const auto fit = fit_loglog_slope(n, ratio);
                entry["slope"] = fit.slope;
                entry["slope_stderr"] = fit.stderr_slope;
            }
            if (!ratio.empty()) {
                entry["ratio_first"] = ratio.front();
                entry["ratio_last"] = ratio.back();
            }
            fits.push_back(entry);
        }
        a["ratio_vs_n"] = fits;
    };
    return plan;
}

// ---------------------------------------------------------------- frequency-scaling

Plan plan_frequency_scaling(const ExperimentConfig& c) {
    const double omega = c.number("omega");
    const auto pairs = lambda_g_pairs(c);
    const auto etas = require_list(c, "eta");
    const int n = c.integer("n");
    if (n < 1) {
        throw ConfigError("key 'n' must be >= 1");
    }
    for (double eta : etas) {
        if (!(eta >= 10.0)) {
            throw ConfigError("eta values must be >= 10");
        }
    }
    const auto policy = cutoff_policy(c);

    Plan plan;
    plan.columns = {{"lambda", "omega"},     {"g", "1"},     {"eta", "1"},
                    {"n", "1"},              {"tau", "1/omega"},
                    {"inv_var_full", "1"},   {"inv_var_closed", "1"},
                    {"delta", "1"},          {"abs_delta", "1"},
                    {"n_cut", "1"}};
    for (const auto& [lambda, g] : pairs) {
        const auto p = make_params(omega, lambda, g);
        for (double eta : etas) {
            Cell cell;
            cell.keys = {num(lambda), num(g), num(eta), num(n)};
            cell.compute = [=] {
                const auto r = fock::finite_frequency_discrepancy(p, eta, n, policy);
                Row row;
                row.values = {num(lambda),       num(g),           num(eta),
                              num(n),            num(r.tau),       num(r.inv_var_full),
                              num(r.inv_var_closed), num(r.delta), num(std::abs(r.delta)),
                              num(r.n_cut)};
                return std::vector<Row>{row};
            };
            plan.cells.push_back(std::move(cell));
        }
    }
    plan.analyze = [](const Dataset& d, Json& a) {
        Json fits = Json::array();
        for (const auto& rows : group_by_pair(d)) {
            std::vector<double> eta, delta;
            double lambda = 0.0;
            double g = 0.0;
            for (const Row* r : rows) {
                if (r->status == CellStatus::ok) {
                    eta.push_back(value_of(d, *r, "eta"));
                    delta.push_back(value_of(d, *r, "abs_delta"));
                    lambda = value_of(d, *r, "lambda");
                    g = value_of(d, *r, "g");
                }
            }
            Json entry = {{"lambda", lambda}, {"g", g}};
            if (eta.size() >= 5) {
                const auto fit = fit_loglog_slope(eta, delta);
                entry["slope"] = fit.slope;
                entry["slope_stderr"] = fit.stderr_slope;
            }
            fits.push_back(entry);
        }
        a["delta_vs_eta"] = fits;
    };
    return plan;
}

// ---------------------------------------------------------------- decoherence

Plan plan_decoherence(const ExperimentConfig& c) {
    const auto engine = c.engine();
    const double omega = c.number("omega");
    const auto pairs = lambda_g_pairs(c);
    auto ts = require_list(c, "t");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (!(ts[i] > ts[i - 1])) {
            throw ConfigError("key 't' must be strictly increasing");
        }
    }
    if (ts.front() < 0.0) {
        throw ConfigError("key 't' must start at t >= 0");
    }
    DecayRates rates;
    try {
        rates = DecayRates::from_plus_minus(c.number("gamma_plus"), c.number("gamma_minus"));
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("decay rates: ") + e.what());
    }
    if (rates.gamma_minus() < 0.0) {
        throw ConfigError("gamma_minus must be >= 0");
    }

    Plan plan;
    plan.columns = columns_for(
        {{"lambda", "omega"}, {"g", "1"}, {"t", "1/omega"}}, engine,
        {{"x_mean_closed", "1"}, {"x_deriv_g_closed", "1"}, {"x_var_closed", "1"},
         {"inv_var_closed", "1"}},
        {{"x_mean_rk", "1"}, {"x_deriv_g_rk", "1"}, {"x_var_rk", "1"}, {"inv_var_rk", "1"}},
        {"rel_dev_inv_var"});
    for (const auto& [lambda, g] : pairs) {
        const auto p = make_params(omega, lambda, g);
        Cell cell;
        cell.keys = {num(lambda), num(g)};
        cell.compute = [=] {
            MomentTrack track;
            std::size_t offset = 0;
            if (uses_oracle(engine)) {
                // the moments start from the initial state at t = 0
                std::vector<double> grid = ts;
                if (grid.front() > 0.0) {
                    grid.insert(grid.begin(), 0.0);
                    offset = 1;
                }
                track = integrate_moments(superposition_01_moments(), p, rates, grid);
            }
            std::vector<Row> rows;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double t = ts[i];
                Row r;
                r.values = {num(lambda), num(g), num(t)};
                double ic = 0.0;
                if (uses_closed(engine)) {
                    const double xm = x_mean_dissipative(p, rates, t);
                    const double xd = x_deriv_g_dissipative(p, rates, t);
                    const double xv = x_variance_dissipative(p, rates, t);
                    ic = xd * xd / xv;
                    r.values.insert(r.values.end(), {num(xm), num(xd), num(xv), num(ic)});
                }
                double irk = 0.0;
                if (uses_oracle(engine)) {
                    const auto& m = track.moments[i + offset];
                    const double xd = track.d_dg[i + offset].x;
                    const double xv = m.x_variance();
                    irk = xd * xd / xv;
                    r.values.insert(r.values.end(), {num(m.x), num(xd), num(xv), num(irk)});
                }
                if (engine == Engine::both) {
                    r.values.push_back(num(rel_dev(ic, irk)));
                }
                rows.push_back(std::move(r));
            }
            return rows;
        };
        plan.cells.push_back(std::move(cell));
    }
    plan.analyze = [engine](const Dataset& d, Json& a) {
        const std::string col = uses_closed(engine) ? "inv_var_closed" : "inv_var_rk";
        Json peaks = Json::array();
        for (const auto& rows : group_by_pair(d)) {
            double best = 0.0;
            double t_best = 0.0;
            double lambda = 0.0;
            double coupling = 0.0;
            for (const Row* r : rows) {
                if (r->status != CellStatus::ok) {
                    continue;
                }
                const double v = value_of(d, *r, col);
                lambda = value_of(d, *r, "lambda");
                coupling = value_of(d, *r, "g");
                if (v > best) {
                    best = v;
                    t_best = value_of(d, *r, "t");
                }
            }
            peaks.push_back({{"lambda", lambda}, {"g", coupling}, {"max_inv_var", best},
                             {"t_at_max", t_best}});
        }
        a["peaks"] = peaks;
    };
    return plan;
}

}  // namespace

const std::vector<ExperimentDef>& registry() {
    static const std::vector<ExperimentDef> defs = {
        {"qfi-evolution",
         "QFI F_g(t) of the effective oscillator near the critical coupling, closed form "
         "against the spectral generator oracle.",
         with_oracle_keys({{"engine", "both", "closed, oracle or both"},
                           {"omega", "1", "boson frequency"},
                           {"lambda", "-0.2475", "quadratic-term strength (units of omega)"},
                           {"g", "0.097, 0.098, 0.099", "couplings, one curve each"},
                           {"t", "0:1000:200", "time grid (1/omega)"}}),
         {Engine::closed, Engine::oracle, Engine::both},
         plan_qfi_evolution},
        {"qfi-vs-g",
         "Closed-form F_g against g at a fixed time for several lambda; beyond g_c the "
         "displaced-frame formula is used.",
         {{"engine", "closed", "closed only"},
          {"omega", "1", "boson frequency"},
          {"lambda", "0, -0.05, -0.1, -0.15, -0.2", "one curve per value"},
          {"g", "0.005:1.5:300", "coupling grid"},
          {"t", "1000", "evaluation time (1/omega)"}},
         {Engine::closed},
         plan_qfi_vs_g},
        {"qfi-map",
         "Dense lambda-g map of log10 F_g at a fixed time (closed form).",
         {{"engine", "closed", "closed only"},
          {"omega", "1", "boson frequency"},
          {"lambda", "-0.2475:0.5:200", "lambda grid (at most 512 values)"},
          {"g", "0.005:2:200", "coupling grid (at most 512 values)"},
          {"t", "1000", "evaluation time (1/omega)"}},
         {Engine::closed},
         plan_qfi_map},
        {"quadrature-vs-g",
         "<X>_t, its g-derivative, variance and I_g against g at a fixed time.",
         with_oracle_keys({{"engine", "both", "closed, oracle or both"},
                           {"omega", "1", "boson frequency"},
                           {"lambda", "0, -0.2, -0.247", "one curve per value"},
                           {"g", "0.005:1.2:240", "coupling grid"},
                           {"t", "75", "evaluation time (1/omega)"}}),
         {Engine::closed, Engine::oracle, Engine::both},
         plan_quadrature_vs_g},
        {"inverted-variance",
         "Time evolution of I_g(t) over several oscillation periods; optional finite-eta "
         "rows evolve the spin-boson model.",
         with_oracle_keys(
             {{"engine", "both", "closed, oracle or both"},
              {"omega", "1", "boson frequency"},
              {"lambda", "0, -0.247, 0", "paired with g"},
              {"g", "0.9, 0.1, 0.1", "paired with lambda"},
              {"periods", "3", "time window in units of tau_1"},
              {"points", "601", "time samples per curve"},
              {"eta", "", "frequency ratios Omega/omega for spin-boson rows (empty: none)"}}),
         {Engine::closed, Engine::oracle, Engine::both},
         plan_inverted_variance},
        {"ratio-scaling",
         "I_g(tau_n) / F_g(tau_n) at the optimal times tau_n against the analytic ratio.",
         with_oracle_keys({{"engine", "both", "closed, oracle or both"},
                           {"omega", "1", "boson frequency"},
                           {"lambda", "0, -0.247, -0.2475", "paired with g"},
                           {"g", "0.9, 0.1, 0.099", "paired with lambda"},
                           {"n", "1:20:20", "peak indices"}}),
         {Engine::closed, Engine::oracle, Engine::both},
         plan_ratio_scaling},
        {"frequency-scaling",
         "Relative discrepancy of the spin-boson I_g at tau_n from the low-frequency "
         "closed form, against eta = Omega/omega.",
         with_oracle_keys({{"engine", "oracle", "oracle only"},
                           {"omega", "1", "boson frequency"},
                           {"lambda", "0, -0.247", "paired with g"},
                           {"g", "0.9, 0.1", "paired with lambda"},
                           {"eta", "100, 300, 1000, 3000, 10000", "frequency ratios"},
                           {"n", "1", "peak index"}}),
         {Engine::oracle},
         plan_frequency_scaling},
        {"decoherence",
         "I_g(t) under decay and heating: closed forms against RK4 moment integration "
         "(the oracle engine).",
         {{"engine", "both", "closed, oracle or both"},
          {"omega", "1", "boson frequency"},
          {"lambda", "-0.247, 0", "paired with g"},
          {"g", "0.1, 0.1", "paired with lambda"},
          {"gamma_minus", "0.01", "gamma_a - gamma_h"},
          {"gamma_plus", "0.03", "gamma_a + gamma_h"},
          {"t", "0:1000:5001", "time grid (1/omega)"}},
         {Engine::closed, Engine::oracle, Engine::both},
         plan_decoherence},
    };
    return defs;
}

}  // namespace cqm::experiments
