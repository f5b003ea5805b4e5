#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dioph/exp_runner.hpp"

using namespace dioph;

namespace {

void print_summary(const Report& r) {
    for (const auto& v : r.verdicts)
        std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  margin=" << v.margin << "  [" << v.anchor << "] "
                  << v.detail << '\n';
    for (const auto& [phase, secs] : r.timing) std::cout << "  time " << phase << ": " << secs << " s\n";
}

int execute(ExperimentManifest m, const std::string& out_dir, const std::string& format) {
    if (!out_dir.empty()) m.set("output_dir", out_dir);
    if (!format.empty()) m.set("format", format);
    Report r = run(m);
    print_summary(r);
    if (!m.has("output_dir")) std::cout << report_to_text(r);
    return exit_code_for(r);
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const InvalidManifest& e) {
        std::cerr << "invalid manifest: " << e.what() << '\n';
        return 4;
    } catch (const RunFailure& e) {
        std::cerr << "failed in phase " << e.phase() << ": " << e.what() << '\n';
        return e.exit_code();
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget: " << e.what() << '\n';
        return 3;
    } catch (const PrecisionError& e) {
        std::cerr << "precision: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diophantine approximation lab"};
    app.require_subcommand(1);
    std::string out_dir, format;

    std::string manifest_path;
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a manifest");
    run_cmd->add_option("manifest", manifest_path, "manifest path")->required();
    run_cmd->add_option("-o,--output-dir", out_dir, "report directory (overrides output_dir)");
    run_cmd->add_option("-f,--format", format, "csv, text or both")->check(CLI::IsMember({"csv", "text", "both"}));

    std::string report_path;
    auto* verify_cmd = app.add_subcommand("verify", "re-run a stored report and compare");
    verify_cmd->add_option("report", report_path, "structured-text report")->required();

    std::string gen_kind;
    auto* gen_cmd = app.add_subcommand("gen-manifest", "print a manifest template");
    gen_cmd->add_option("kind", gen_kind, "experiment kind")->required()->check(CLI::IsMember(ExperimentManifest::kinds()));

    std::vector<std::pair<CLI::App*, std::vector<std::string>>> kind_cmds;
    kind_cmds.reserve(ExperimentManifest::kinds().size());
    for (const auto& k : ExperimentManifest::kinds()) {
        auto* c = app.add_subcommand(k, "run the " + k + " experiment from key=value settings");
        kind_cmds.emplace_back(c, std::vector<std::string>{});
        c->add_option("settings", kind_cmds.back().second, "key=value pairs");
        c->add_option("-o,--output-dir", out_dir, "report directory");
        c->add_option("-f,--format", format, "csv, text or both")->check(CLI::IsMember({"csv", "text", "both"}));
    }

    CLI11_PARSE(app, argc, argv);

    return guarded([&]() -> int {
        if (*run_cmd) return execute(ExperimentManifest::load(manifest_path), out_dir, format);
        if (*gen_cmd) {
            std::cout << ExperimentManifest::template_for(gen_kind).to_text();
            return 0;
        }
        if (*verify_cmd) {
            std::ifstream in(report_path);
            if (!in) throw IoError("cannot read " + report_path);
            std::stringstream ss;
            ss << in.rdbuf();
            Report stored = parse_report(ss.str());
            VerifyResult v = verify_report(stored);
            for (const auto& d : v.differences) std::cout << "differs: " << d << '\n';
            std::cout << (v.reproduced ? "reproduced" : "not reproduced") << ", "
                      << (v.all_pass ? "all verdicts pass" : "some verdict fails") << '\n';
            return v.reproduced && v.all_pass ? 0 : 2;
        }
        for (auto& [cmd, settings] : kind_cmds) {
            if (!*cmd) continue;
            std::string text = "kind = " + cmd->get_name() + "\n";
            for (const auto& s : settings) {
                if (s.find('=') == std::string::npos) throw InvalidManifest("expected key=value, got '" + s + "'");
                text += s + "\n";
            }
            return execute(ExperimentManifest::parse(text), out_dir, format);
        }
        return 1;
    });
}
