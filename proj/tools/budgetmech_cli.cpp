// Command-line driver: generate family instances, solve class optima,
// verify mechanisms, sweep revenue gaps, query menu extensions, and print
// the public-valuation closed form. Identical inputs give byte-identical
// outputs.

#include "budgetmech/analysis.hpp"
#include "budgetmech/errors.hpp"
#include "budgetmech/feasibility.hpp"
#include "budgetmech/model_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using budgetmech::Rat;
using json = nlohmann::ordered_json;

constexpr int kExitInternal = 1;
constexpr int kExitIo = 3;
constexpr int kExitBadInput = 4;
constexpr int kExitBudget = 5;

std::string resolve_out(const std::string& path) {
    namespace fs = std::filesystem;
    if (path.empty() || fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("BUDGETMECH_OUT_DIR")) {
        return (fs::path(dir) / path).string();
    }
    return path;
}

void emit_json(const std::optional<std::string>& out, const json& j) {
    if (out) {
        budgetmech::write_json_file(resolve_out(*out), j);
    } else {
        std::cout << j.dump(2) << "\n";
    }
}

void emit_text(const std::optional<std::string>& out, const std::string& text) {
    if (out) {
        budgetmech::write_text_file(resolve_out(*out), text);
    } else {
        std::cout << text;
    }
}

std::vector<Rat> parse_rat_list(const std::string& text) {
    std::vector<Rat> values;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) values.push_back(budgetmech::parse_rat(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return values;
}

struct FamilyFlags {
    std::string name;
    int k = 0, n = 0, precision = 0;
    std::string B, H, eps;

    budgetmech::FamilyParams to_params() const {
        budgetmech::FamilyParams p;
        p.name = budgetmech::parse_family_name(name);
        if (k > 0) p.k = k;
        if (n > 0) p.n = n;
        if (precision > 0) p.precision = precision;
        if (!B.empty()) p.B = budgetmech::parse_rat(B);
        if (!H.empty()) p.H = budgetmech::parse_rat(H);
        if (!eps.empty()) p.eps = budgetmech::parse_rat(eps);
        return p;
    }

    void attach(CLI::App* cmd, bool name_required) {
        auto* opt = cmd->add_option("--name", name, "family name");
        if (name_required) opt->required();
        cmd->add_option("--k", k, "type count parameter");
        cmd->add_option("--n", n, "truncation length");
        cmd->add_option("--precision", precision, "rational digits for irrational masses");
        cmd->add_option("--B", B, "budget scale parameter (rational)");
        cmd->add_option("--H", H, "high-type parameter (rational)");
        cmd->add_option("--eps", eps, "epsilon parameter (rational)");
    }
};

struct BudgetFlags {
    std::size_t indicator_cap = 20;
    std::uint64_t node_budget = 1u << 20;
    std::uint64_t assignment_cap = 1u << 20;
    int grid_cap = 128;
    std::string delta = "0";

    budgetmech::SolveOptions to_options() const {
        budgetmech::SolveOptions o;
        o.indicator_cap = indicator_cap;
        o.node_budget = node_budget;
        o.assignment_cap = assignment_cap;
        o.oracle_grid_cap = grid_cap;
        o.delta = budgetmech::parse_rat(delta);
        return o;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--indicator-cap", indicator_cap, "max affordability indicators");
        cmd->add_option("--node-budget", node_budget, "max branch-search LP solves");
        cmd->add_option("--assignment-cap", assignment_cap, "max menu-slot assignments");
        cmd->add_option("--grid-cap", grid_cap, "max oracle grid resolution");
        cmd->add_option("--delta", delta, "strictness gap for unaffordable branches");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solvers for single-buyer selling with private hard budgets"};
    app.require_subcommand(1);

    FamilyFlags fam_flags;
    std::optional<std::string> fam_out, fam_partner_out, fam_witness_out;
    auto* family = app.add_subcommand("family", "generate a parameterized instance");
    fam_flags.attach(family, true);
    family->add_option("--out", fam_out, "distribution output path");
    family->add_option("--partner-out", fam_partner_out, "dominating partner output path");
    family->add_option("--witness-out", fam_witness_out, "witness mechanism output path");

    std::string solve_class_name, solve_input;
    std::optional<std::string> solve_out;
    BudgetFlags solve_budget;
    auto* solve = app.add_subcommand("solve", "optimal revenue for a mechanism class");
    solve->add_option("--class", solve_class_name, "m | sic | cb | menu:<cap> | posted")->required();
    solve->add_option("--input", solve_input, "distribution JSON file")->required();
    solve->add_option("--out", solve_out, "result output path");
    solve_budget.attach(solve);

    std::string verify_class_name = "m", verify_input, verify_mech;
    std::optional<std::string> verify_out;
    auto* verify = app.add_subcommand("verify", "check a mechanism against a class");
    verify->add_option("--class", verify_class_name, "constraint class");
    verify->add_option("--input", verify_input, "distribution JSON file")->required();
    verify->add_option("--mechanism", verify_mech, "mechanism JSON file")->required();
    verify->add_option("--out", verify_out, "report output path");

    FamilyFlags sweep_flags;
    std::string sweep_params, sweep_num = "m", sweep_den = "m", sweep_format = "json";
    std::optional<std::string> sweep_out;
    BudgetFlags sweep_budget;
    auto* sweep = app.add_subcommand("sweep", "revenue-gap ratios across a parameter grid");
    sweep_flags.attach(sweep, true);
    sweep->add_option("--params", sweep_params, "comma list of swept values")->required();
    sweep->add_option("--numerator", sweep_num, "class or 'witness'");
    sweep->add_option("--denominator", sweep_den, "class or 'witness'");
    sweep->add_option("--format", sweep_format, "json | csv");
    sweep->add_option("--out", sweep_out, "report output path");
    sweep_budget.attach(sweep);

    std::string extend_mech;
    std::vector<std::string> extend_queries;
    std::optional<std::string> extend_points_file, extend_out;
    auto* extend = app.add_subcommand("extend", "answer off-support queries via the menu");
    extend->add_option("--mechanism", extend_mech, "mechanism JSON file")->required();
    extend->add_option("--query", extend_queries, "point 'v,w' (repeatable)");
    extend->add_option("--points", extend_points_file, "JSON file with [{\"v\":..,\"w\":..}]");
    extend->add_option("--out", extend_out, "answers output path");

    std::string ex1_vhat = "2";
    double ex1_tol = 1e-6;
    std::string ex1_budgets;
    std::optional<std::string> ex1_out;
    auto* example1 = app.add_subcommand("example1", "public-valuation closed form");
    example1->add_option("--v-hat", ex1_vhat, "public valuation (rational, > 1)");
    example1->add_option("--tolerance", ex1_tol, "optimizer tolerance");
    example1->add_option("--budgets", ex1_budgets, "comma list of query budgets");
    example1->add_option("--out", ex1_out, "table output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (family->parsed()) {
            const auto params = fam_flags.to_params();
            const auto result = budgetmech::make_family(params);
            json j = budgetmech::distribution_to_json(result.distribution);
            if (result.tail_mass) j["tail_mass"] = budgetmech::rat_str(*result.tail_mass);
            if (result.approx_residual) {
                j["approx_residual"] = budgetmech::rat_str(*result.approx_residual);
            }
            emit_json(fam_out, j);
            if (fam_partner_out) {
                if (!result.partner) {
                    throw std::invalid_argument("family " + fam_flags.name + " has no partner");
                }
                emit_json(fam_partner_out, budgetmech::distribution_to_json(*result.partner));
            }
            if (fam_witness_out) {
                const auto witness = budgetmech::witness_mechanism(params);
                emit_json(fam_witness_out,
                          budgetmech::mechanism_to_json(
                              witness, result.distribution.label() + "-witness"));
            }
        } else if (solve->parsed()) {
            const auto cls = budgetmech::ClassSpec::parse(solve_class_name);
            const auto d = budgetmech::load_distribution(solve_input);
            const auto result = budgetmech::solve_class(d, cls, solve_budget.to_options());
            emit_json(solve_out, budgetmech::solve_result_to_json(result));
        } else if (verify->parsed()) {
            const auto cls = budgetmech::ClassSpec::parse(verify_class_name);
            const auto d = budgetmech::load_distribution(verify_input);
            const auto mech = budgetmech::load_mechanism(verify_mech);
            const auto report = budgetmech::check_feasible(mech, d, cls);
            emit_json(verify_out, budgetmech::feasibility_report_to_json(report));
        } else if (sweep->parsed()) {
            const auto report = budgetmech::gap_sweep(
                sweep_flags.to_params(), parse_rat_list(sweep_params),
                budgetmech::ValueSource::parse(sweep_num),
                budgetmech::ValueSource::parse(sweep_den), sweep_budget.to_options());
            if (sweep_format == "csv") {
                emit_text(sweep_out, budgetmech::gap_report_csv(report));
            } else if (sweep_format == "json") {
                emit_json(sweep_out, budgetmech::gap_report_json(report));
            } else {
                throw std::invalid_argument("unknown format '" + sweep_format + "'");
            }
        } else if (extend->parsed()) {
            const auto mech = budgetmech::load_mechanism(extend_mech);
            const auto ext = budgetmech::ExtendedMechanism::from_mechanism(mech);
            std::vector<std::pair<Rat, Rat>> points;
            for (const auto& q : extend_queries) {
                const auto comma = q.find(',');
                if (comma == std::string::npos) {
                    throw std::invalid_argument("query '" + q + "' is not 'v,w'");
                }
                points.emplace_back(budgetmech::parse_rat(q.substr(0, comma)),
                                    budgetmech::parse_rat(q.substr(comma + 1)));
            }
            if (extend_points_file) {
                const auto j = budgetmech::read_json_file(*extend_points_file);
                for (const auto& row : j) {
                    points.emplace_back(budgetmech::parse_rat(row.at("v").get<std::string>()),
                                        budgetmech::parse_rat(row.at("w").get<std::string>()));
                }
            }
            if (points.empty()) throw std::invalid_argument("no query points given");
            json answers = json::array();
            for (const auto& [v, w] : points) {
                const auto lot = budgetmech::extend_query(ext, v, w);
                json row;
                row["v"] = budgetmech::rat_str(v);
                row["w"] = budgetmech::rat_str(w);
                row["q"] = budgetmech::rat_str(lot.q());
                row["p"] = budgetmech::rat_str(lot.p());
                answers.push_back(row);
            }
            emit_json(extend_out, answers);
        } else if (example1->parsed()) {
            const Rat v_hat = budgetmech::parse_rat(ex1_vhat);
            const auto opt = budgetmech::example1_optimal_wc(v_hat, ex1_tol);
            // Rational snap of the optimizer output keeps the lottery
            // table exact.
            const Rat w_c(static_cast<long long>(opt.w_c * 1e9 + 0.5), 1000000000LL);
            std::vector<Rat> budgets;
            if (!ex1_budgets.empty()) {
                budgets = parse_rat_list(ex1_budgets);
            } else {
                for (int j = 0; j <= 10; ++j) budgets.emplace_back(j, 10);
            }
            json j;
            j["v_hat"] = budgetmech::rat_str(v_hat);
            j["w_c"] = budgetmech::rat_str(w_c);
            j["revenue"] = opt.revenue;
            j["table"] = json::array();
            for (const auto& w : budgets) {
                const auto lot =
                    budgetmech::example1_query({v_hat, w_c}, w);
                json row;
                row["w"] = budgetmech::rat_str(w);
                row["q"] = budgetmech::rat_str(lot.q());
                row["p"] = budgetmech::rat_str(lot.p());
                j["table"].push_back(row);
            }
            emit_json(ex1_out, j);
        }
    } catch (const budgetmech::BudgetExceeded& e) {
        std::cerr << "error: budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: input: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
