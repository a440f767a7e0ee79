// Command-line front end: averaged functions, zero bounds, certified counts,
// table grids, periodic-orbit verification, and the two built-in case
// studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "zhopf/geometry.hpp"
#include "zhopf/io.hpp"
#include "zhopf/odeint.hpp"
#include "zhopf/presets.hpp"
#include "zhopf/realroots.hpp"

using namespace zhopf;
using Json = nlohmann::ordered_json;

namespace {

struct LoadedSystem {
    PerturbedSystem system;
    std::map<std::string, Rat> params;
    std::optional<std::vector<std::pair<Rat, Rat>>> box;
    std::optional<CaseStudyPreset> preset;
};

LoadedSystem load_input(const std::string& system_path, const std::string& preset_name, int order,
                        bool vanished) {
    if (!preset_name.empty()) {
        CaseStudyPreset preset = build_preset(preset_name, order);
        PerturbedSystem sys = vanished ? preset.vanished_system() : preset.system;
        return {std::move(sys), {}, std::nullopt, std::move(preset)};
    }
    if (system_path.empty())
        throw std::invalid_argument("either --system or --preset is required");
    SystemFile file = load_system_file(system_path);
    return {std::move(file.system), std::move(file.params), std::move(file.box), std::nullopt};
}

void merge_params(LoadedSystem& in, const std::string& params_path) {
    if (params_path.empty()) return;
    std::ifstream f(params_path);
    if (!f) throw std::invalid_argument("cannot open params file '" + params_path + "'");
    Json doc = Json::parse(f);
    for (const auto& [name, v] : doc.items()) in.params[name] = parse_rat(v.get<std::string>());
}

std::vector<Rat> resolve_binding(const LoadedSystem& in, bool vanished) {
    if (in.preset) return in.preset->bind(in.params, vanished);
    std::vector<Rat> out(in.system.arity(), Rat(0));
    for (const auto& [name, v] : in.params) out[in.system.symbols().require(name)] = v;
    return out;
}

Json averaged_to_json(const PerturbedSystem& sys, const AveragedSystem& avg) {
    const SymbolTable& t = sys.symbols();
    auto vars = state_var_names(sys.n());
    Json orders = Json::array();
    for (int i = 1; i <= avg.up_to; ++i) {
        Json comps = Json::array();
        for (int c = 0; c < sys.nvars(); ++c) {
            const AveragedComponent& comp = avg.component(i, c);
            Json entry;
            entry["component"] = vars[c == 0 ? 0 : c];
            if (comp.is_zero()) {
                entry["zero"] = true;
            } else {
                FactoredComponent f = factor_component(comp);
                entry["mu"] = comp.mu;
                entry["scale"] = f.scale_string(t);
                Json monos = Json::object();
                for (const auto& [e, pc] : f.fbar.terms()) {
                    std::string key;
                    for (int v = 0; v < f.fbar.nvars(); ++v) {
                        if (e[v] == 0) continue;
                        if (!key.empty()) key += "*";
                        key += vars[v];
                        if (e[v] > 1) key += "^" + std::to_string(e[v]);
                    }
                    if (key.empty()) key = "1";
                    monos[key] = pc.to_string(t);
                }
                entry["fbar"] = monos;
            }
            comps.push_back(entry);
        }
        orders.push_back(Json{{"order", i},
                              {"vanishes", avg.order_vanishes(i)},
                              {"components", comps}});
    }
    return orders;
}

Json count_to_json(const CountResult& res) {
    Json out;
    out["count"] = res.count;
    out["complete"] = res.complete;
    out["undecided_boxes"] = res.undecided_boxes;
    Json certs = Json::array();
    for (const auto& c : res.certificates) {
        Json box = Json::array();
        for (const auto& [lo, hi] : c.box) box.push_back(Json::array({rat_to_string(lo), rat_to_string(hi)}));
        certs.push_back(Json{{"box", box},
                             {"midpoint", c.midpoint},
                             {"jacobian_sign", c.jacobian_sign},
                             {"multiplicity_one", c.multiplicity_one},
                             {"boundary_suspect", c.boundary_suspect}});
    }
    out["certificates"] = certs;
    return out;
}

void emit(const Json& doc, const std::string& format) {
    if (format == "text") {
        // flat rendering for quick reading
        std::function<void(const Json&, int)> walk = [&](const Json& j, int depth) {
            std::string pad(2 * depth, ' ');
            if (j.is_object()) {
                for (const auto& [k, v] : j.items()) {
                    if (v.is_object() || v.is_array()) {
                        std::cout << pad << k << ":\n";
                        walk(v, depth + 1);
                    } else {
                        std::cout << pad << k << ": " << v.dump() << "\n";
                    }
                }
            } else if (j.is_array()) {
                for (const auto& v : j) {
                    if (v.is_object() || v.is_array()) {
                        std::cout << pad << "-\n";
                        walk(v, depth + 1);
                    } else {
                        std::cout << pad << "- " << v.dump() << "\n";
                    }
                }
            }
        };
        walk(doc, 0);
    } else {
        std::cout << doc.dump(2) << "\n";
    }
}

std::pair<int, int> parse_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

int run(int argc, char** argv) {
    CLI::App app{"zero-Hopf limit-cycle toolkit"};
    app.require_subcommand(1);

    std::string system_path, preset_name, params_path, format = "json";
    int order = 1;
    bool vanished = false;
    unsigned long seed = 0;

    auto add_common = [&](CLI::App* cmd, bool with_order = true) {
        cmd->add_option("--system", system_path, "system definition file (JSON)");
        cmd->add_option("--preset", preset_name, "built-in case study: third_order | hyperchaotic");
        cmd->add_option("--params", params_path, "JSON file of parameter bindings");
        cmd->add_option("--format", format, "output format: json | text");
        cmd->add_flag("--vanished", vanished, "apply the preset's first-order vanishing substitution");
        if (with_order) cmd->add_option("--order", order, "averaging order (a note is printed above 3)");
        return cmd;
    };

    // avg ---------------------------------------------------------------
    auto* avg_cmd = add_common(app.add_subcommand("avg", "averaged functions up to the requested order"));

    // bounds --------------------------------------------------------------
    auto* bounds_cmd = app.add_subcommand("bounds", "Bezout and mixed-volume bounds");
    std::string bn = "3", bm = "2";
    int bk = 1;
    bounds_cmd->add_option("--n", bn, "dimension n");
    bounds_cmd->add_option("--m", bm, "degree m");
    bounds_cmd->add_option("--k", bk, "averaging order");
    bounds_cmd->add_option("--format", format, "output format: json | text");

    // count ---------------------------------------------------------------
    auto* count_cmd = add_common(app.add_subcommand("count", "certified real-zero count of the averaged system"));
    std::string box_text;
    count_cmd->add_option("--box", box_text, "search box lo:hi[,lo:hi...] per variable");
    count_cmd->add_option("--seed", seed, "seed for sampling sweeps");
    int sweep_m = 0;
    long sweep_count = 0;
    count_cmd->add_option("--sample-sweep-m", sweep_m, "random 3d instance sweep: degree m");
    count_cmd->add_option("--sample-sweep-count", sweep_count, "random 3d instance sweep: instances");

    // verify ----------------------------------------------------------------
    auto* verify_cmd = add_common(app.add_subcommand("verify", "locate periodic orbits by shooting"));
    std::string eps_text = "1/100,1/200,1/1000";
    verify_cmd->add_option("--eps-sweep", eps_text, "comma-separated rational eps values");

    // tables ----------------------------------------------------------------
    auto* tables_cmd = app.add_subcommand("tables", "bound grids over (n, m) ranges");
    std::string kind = "bkk1", nrange = "3..4", mrange = "2..5";
    tables_cmd->add_option("--kind", kind, "bkk1 | bkk2 | bezout1");
    tables_cmd->add_option("--n", nrange, "n range, e.g. 3..5");
    tables_cmd->add_option("--m", mrange, "m range, e.g. 2..8");
    tables_cmd->add_option("--format", format, "output format: json | text");

    // preset ----------------------------------------------------------------
    auto* preset_cmd = app.add_subcommand("preset", "emit a case-study system file");
    std::string pname = "third_order";
    preset_cmd->add_option("--name", pname, "third_order | hyperchaotic")->required();
    preset_cmd->add_option("--order", order, "perturbation order");
    preset_cmd->add_flag("--vanished", vanished, "apply the first-order vanishing substitution");

    CLI11_PARSE(app, argc, argv);

    if (order > 3)
        std::cerr << "note: averaging order " << order << " may be expensive\n";

    if (avg_cmd->parsed()) {
        LoadedSystem in = load_input(system_path, preset_name, std::max(order, 1), vanished);
        merge_params(in, params_path);
        AveragedSystem avg = averaged_functions(in.system, order);
        Json doc;
        doc["command"] = "avg";
        doc["n"] = in.system.n();
        doc["m"] = in.system.m();
        doc["order"] = order;
        doc["orders"] = averaged_to_json(in.system, avg);
        for (int i = 1; i < order; ++i)
            if (!avg.order_vanishes(i)) {
                doc["warning"] = "lower-order averaged functions do not vanish";
                break;
            }
        emit(doc, format);
        return 0;
    }

    if (bounds_cmd->parsed()) {
        auto [n0, n1] = parse_range(bn);
        auto [m0, m1] = parse_range(bm);
        Json rows = Json::array();
        for (int n = n0; n <= n1; ++n)
            for (int m = m0; m <= m1; ++m) {
                BezoutBounds bb = bezout_bounds(n, m, bk);
                Json row{{"n", n},
                         {"m", m},
                         {"k", bk},
                         {"bezout_order_k", bb.order_k.get_str()},
                         {"bezout_first_order", bb.first_order.get_str()}};
                if (n - 1 <= 5)
                    row["bkk_first_order"] = bkk_first_order(n, m).get_str();
                else
                    row["bkk_first_order"] = "-";
                rows.push_back(row);
            }
        emit(Json{{"command", "bounds"}, {"rows", rows}}, format);
        return 0;
    }

    if (count_cmd->parsed()) {
        if (sweep_count > 0) {
            long worst = 0;
            long incomplete = 0;
            for (long i = 0; i < sweep_count; ++i) {
                SemiAlgSystem sys = random_first_order_3d(sweep_m, seed + static_cast<unsigned long>(i));
                CountResult res = count_box(sys);
                if (!res.complete) ++incomplete;
                worst = std::max(worst, res.count);
            }
            emit(Json{{"command", "count"},
                      {"sample_sweep_m", sweep_m},
                      {"instances", sweep_count},
                      {"max_count", worst},
                      {"incomplete_instances", incomplete}},
                 format);
            return incomplete ? 4 : 0;
        }
        LoadedSystem in = load_input(system_path, preset_name, std::max(order, 1), vanished);
        merge_params(in, params_path);
        std::vector<Rat> binding = resolve_binding(in, vanished);
        AveragedSystem avg = averaged_functions(in.system, order);
        for (int i = 1; i < order; ++i)
            if (!avg.order_vanishes(i))
                std::cerr << "warning: order-" << i << " averaged functions do not vanish\n";
        SemiAlgSystem sas = semialg_from_averaged(avg, order, binding);
        if (in.box) sas.box = *in.box;
        if (!box_text.empty()) {
            std::vector<std::pair<Rat, Rat>> box;
            std::stringstream ss(box_text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto colon = item.find(':');
                if (colon == std::string::npos) throw std::invalid_argument("bad --box");
                box.emplace_back(parse_rat(item.substr(0, colon)), parse_rat(item.substr(colon + 1)));
            }
            sas.box = box;
        }
        CountResult res = sas.nvars() == 2 ? count_bivariate(sas) : count_box(sas);
        Json doc;
        doc["command"] = "count";
        doc["order"] = order;
        doc["result"] = count_to_json(res);
        emit(doc, format);
        return res.complete ? 0 : 4;
    }

    if (verify_cmd->parsed()) {
        LoadedSystem in = load_input(system_path, preset_name, std::max(order, 1), vanished);
        merge_params(in, params_path);
        std::vector<Rat> binding = resolve_binding(in, vanished);
        AveragedSystem avg = averaged_functions(in.system, order);
        SemiAlgSystem sas = semialg_from_averaged(avg, order, binding);
        CountResult count = sas.nvars() == 2 ? count_bivariate(sas) : count_box(sas);

        std::vector<double> eps_values;
        {
            std::stringstream ss(eps_text);
            std::string item;
            while (std::getline(ss, item, ',')) eps_values.push_back(parse_rat(item).get_d());
        }
        double b = in.system.frequency().evaluate(binding).get_d();
        double period_target = 2 * M_PI / std::abs(b);
        const int n = in.system.n();
        double resc_exp = 1.0 / (in.system.m() - 1);

        Json zeros = Json::array();
        for (const auto& cert : count.certificates) {
            Json sweeps = Json::array();
            for (double eps : eps_values) {
                FlowSpec flow = compile_flow(in.system, binding, eps);
                Section section;
                section.normal.assign(n, 0.0);
                section.normal[1] = 1.0;
                section.direction = b > 0 ? +1 : -1;
                double scale = std::pow(eps, resc_exp);
                std::vector<double> guess(n, 0.0);
                guess[0] = scale * cert.midpoint[0];
                for (int v = 2; v < n; ++v) guess[v] = scale * cert.midpoint[v - 1];
                Json entry;
                entry["eps"] = eps;
                try {
                    PeriodicOrbit orbit = find_periodic(flow, section, guess, 40 * period_target);
                    entry["fixed_point"] = orbit.fixed_point;
                    entry["period"] = orbit.period;
                    entry["period_relative_error"] =
                        std::abs(orbit.period - period_target) / period_target;
                    entry["residual"] = orbit.residual;
                    std::vector<double> rescaled(n - 1);
                    rescaled[0] = orbit.fixed_point[0] / scale;
                    for (int v = 2; v < n; ++v) rescaled[v - 1] = orbit.fixed_point[v] / scale;
                    entry["rescaled_fixed_point"] = rescaled;
                    std::vector<double> err(n - 1);
                    err[0] = std::abs(rescaled[0] - cert.midpoint[0]);
                    for (int v = 1; v < n - 1; ++v) err[v] = std::abs(rescaled[v] - cert.midpoint[v]);
                    entry["rescaled_error"] = err;
                } catch (const std::exception& e) {
                    entry["error"] = e.what();
                }
                sweeps.push_back(entry);
            }
            zeros.push_back(Json{{"predicted_zero", cert.midpoint}, {"sweep", sweeps}});
        }
        Json doc;
        doc["command"] = "verify";
        doc["order"] = order;
        doc["period_target"] = period_target;
        doc["count"] = count.count;
        doc["orbits"] = zeros;
        emit(doc, format);
        return 0;
    }

    if (tables_cmd->parsed()) {
        auto [n0, n1] = parse_range(nrange);
        auto [m0, m1] = parse_range(mrange);
        Json rows = Json::array();
        for (int n = n0; n <= n1; ++n) {
            Json entries = Json::array();
            for (int m = m0; m <= m1; ++m) {
                Json cell{{"m", m}};
                try {
                    if (kind == "bkk1")
                        cell["value"] = bkk_first_order(n, m).get_str();
                    else if (kind == "bkk2")
                        cell["value"] = bkk_second_order(n, m).get_str();
                    else if (kind == "bezout1")
                        cell["value"] = bezout_bounds(n, m, 1).first_order.get_str();
                    else
                        throw std::invalid_argument("tables: unknown kind '" + kind + "'");
                } catch (const std::invalid_argument& e) {
                    if (std::string(e.what()).find("unsupported") == std::string::npos) throw;
                    cell["value"] = "-";  // dimension limit
                }
                entries.push_back(cell);
            }
            rows.push_back(Json{{"n", n}, {"entries", entries}});
        }
        emit(Json{{"command", "tables"}, {"kind", kind}, {"rows", rows}}, format);
        return 0;
    }

    if (preset_cmd->parsed()) {
        CaseStudyPreset preset = build_preset(pname, order);
        PerturbedSystem sys = vanished ? preset.vanished_system() : preset.system;
        std::cout << system_file_to_json(sys) << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
