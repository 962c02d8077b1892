// msr: run multisymplectic reduction scenarios from the command line.
//
//   msr run <file> [--json] [--order lex|grevlex]
//   msr builtin <name> [--run] [--json] [--order lex|grevlex]
//   msr check-jacobi <file> --arity <k> [--trials <t>] [--json] [--order ...]
//
// Exit codes: 0 all queries pass, 1 some query reports false or a violation,
// 2 parse or engine error.

#include "msr/builtins.hpp"
#include "msr/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

msr::MonomialOrder order_from(const std::string& name) {
    return name == "lex" ? msr::MonomialOrder::lex : msr::MonomialOrder::grevlex;
}

int execute(const std::string& source, const std::string& label,
            msr::MonomialOrder order, bool json) {
    try {
        msr::Scenario sc = msr::parse_scenario(source);
        msr::RunResult rr = msr::run_scenario(sc, order);
        if (json)
            std::cout << msr::run_result_json(rr, label, order).dump(2) << "\n";
        else
            std::cout << msr::run_result_text(rr, label, order);
        if (rr.any_error()) return 2;
        return rr.all_pass() ? 0 : 1;
    } catch (const msr::ParseError& e) {
        std::cerr << label << ": " << e.what() << "\n";
        return 2;
    } catch (const msr::EngineError& e) {
        std::cerr << label << ": " << e.what() << "\n";
        return 2;
    }
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multisymplectic observable reduction scenarios"};
    app.require_subcommand(1);

    std::string run_file, run_order = "grevlex";
    bool run_json = false;
    CLI::App* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("file", run_file, "scenario file (.msr)")->required();
    run->add_flag("--json", run_json, "emit JSON verdicts instead of text");
    run->add_option("--order", run_order, "monomial order (default grevlex)")
        ->check(CLI::IsMember({"lex", "grevlex"}));

    std::string b_name, b_order = "grevlex";
    bool b_json = false, b_run = false;
    CLI::App* builtin =
        app.add_subcommand("builtin", "print (or run) a builtin scenario");
    builtin->add_option("name", b_name, "builtin scenario name")->required();
    builtin->add_flag("--run", b_run, "run the scenario instead of printing it");
    builtin->add_flag("--json", b_json, "with --run, emit JSON verdicts");
    builtin->add_option("--order", b_order, "monomial order (default grevlex)")
        ->check(CLI::IsMember({"lex", "grevlex"}));

    std::string j_file, j_order = "grevlex";
    long j_arity = 0, j_trials = -1;
    bool j_json = false;
    CLI::App* cj = app.add_subcommand(
        "check-jacobi", "run only the homotopy Jacobi identities of a scenario");
    cj->add_option("file", j_file, "scenario file (.msr)")->required();
    cj->add_option("--arity", j_arity, "check identities up to this arity")
        ->required()
        ->check(CLI::PositiveNumber);
    cj->add_option("--trials", j_trials,
                   "random combinations per arity (default 20)")
        ->check(CLI::NonNegativeNumber);
    cj->add_flag("--json", j_json, "emit JSON verdicts instead of text");
    cj->add_option("--order", j_order, "monomial order (default grevlex)")
        ->check(CLI::IsMember({"lex", "grevlex"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) {
        std::string source;
        if (!read_file(run_file, source)) {
            std::cerr << "cannot read '" << run_file << "'\n";
            return 2;
        }
        return execute(source, run_file, order_from(run_order), run_json);
    }

    if (builtin->parsed()) {
        const std::string* source = msr::find_builtin(b_name);
        if (!source) {
            std::cerr << "unknown builtin '" << b_name << "'; available:";
            for (const auto& [nm, src] : msr::builtin_scenarios())
                std::cerr << " " << nm;
            std::cerr << "\n";
            return 2;
        }
        if (!b_run && !b_json) {
            std::cout << *source;
            return 0;
        }
        return execute(*source, b_name, order_from(b_order), b_json);
    }

    // check-jacobi: keep the declarations, drop the query list, append one
    // jacobi query at the requested arity.
    std::string source;
    if (!read_file(j_file, source)) {
        std::cerr << "cannot read '" << j_file << "'\n";
        return 2;
    }
    try {
        msr::Scenario sc = msr::parse_scenario(source);
        msr::Scenario only;
        for (const msr::ScenarioItem& item : sc.items)
            if (std::holds_alternative<msr::Statement>(item)) only.items.push_back(item);
        msr::Query q;
        q.kind = msr::Query::K::Jacobi;
        q.arity = j_arity;
        q.trials = j_trials;
        only.items.push_back(q);
        msr::RunResult rr = msr::run_scenario(only, order_from(j_order));
        if (j_json)
            std::cout << msr::run_result_json(rr, j_file, order_from(j_order)).dump(2)
                      << "\n";
        else
            std::cout << msr::run_result_text(rr, j_file, order_from(j_order));
        if (rr.any_error()) return 2;
        return rr.all_pass() ? 0 : 1;
    } catch (const msr::ParseError& e) {
        std::cerr << j_file << ": " << e.what() << "\n";
        return 2;
    } catch (const msr::EngineError& e) {
        std::cerr << j_file << ": " << e.what() << "\n";
        return 2;
    }
}
