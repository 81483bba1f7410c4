/**
 * @file khmr.cpp
 * @brief Command line front end: homology tables, self-checks, knotification and brackets.
 *
 * Exit codes: 0 success, 1 a verification failed, 2 bad input, 3 a resource
 * ceiling was hit.
 */
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "khmr/decat.hpp"
#include "khmr/kh_pipeline.hpp"
#include "khmr/verify.hpp"

using namespace khmr;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verification = 1;
constexpr int exit_input = 2;
constexpr int exit_resource = 3;

struct CommonOptions {
    std::string config;
    std::string cache;
    std::optional<int> kmax;
    std::optional<int> jobs;
    std::optional<std::size_t> max_objects;
};

/// Defaults, then the config file, then KHMR_CACHE_ROOT, then flags.
PipelineConfig make_config(const CommonOptions& o) {
    PipelineConfig cfg;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw InvalidInput("cannot read config file " + o.config);
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.contains("cache_root")) cfg.cache_root = j.at("cache_root").get<std::string>();
        if (j.contains("k_ceiling")) cfg.k_ceiling = j.at("k_ceiling").get<int>();
        if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
        if (j.contains("max_objects")) cfg.limits.max_objects = j.at("max_objects").get<std::size_t>();
        if (j.contains("max_entries")) cfg.limits.max_entries = j.at("max_entries").get<std::size_t>();
    }
    if (const char* env = std::getenv("KHMR_CACHE_ROOT"); env && *env) cfg.cache_root = env;
    if (!o.cache.empty()) cfg.cache_root = o.cache;
    if (o.kmax) cfg.k_ceiling = *o.kmax;
    if (o.jobs) cfg.jobs = *o.jobs;
    if (o.max_objects) cfg.limits.max_objects = *o.max_objects;
    if (cfg.k_ceiling < 1) throw InvalidInput("k ceiling must be positive");
    if (cfg.jobs < 1) throw InvalidInput("jobs must be positive");
    return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "JSON config with cache_root, k_ceiling, jobs, max_objects, max_entries");
    cmd->add_option("--cache", o.cache, "twist cache root (overrides KHMR_CACHE_ROOT and the config)");
    cmd->add_option("--kmax", o.kmax, "largest twist count tried per gate");
    cmd->add_option("--jobs", o.jobs, "worker cap");
    cmd->add_option("--max-objects", o.max_objects, "abort when a complex would exceed this many objects");
}

std::string read_input(const std::string& file) {
    if (file == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream in(file);
    if (!in) throw InvalidInput("cannot read " + file);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Parses "e1:e2,e3:e4" where each point is an edge label, optionally "label@pos".
std::vector<std::pair<EdgePoint, EdgePoint>> parse_pairs(const std::string& spec) {
    std::vector<std::pair<EdgePoint, EdgePoint>> out;
    if (spec.empty()) return out;
    auto point = [](const std::string& s) {
        EdgePoint p;
        auto at = s.find('@');
        try {
            p.edge = std::stoi(s.substr(0, at));
            if (at != std::string::npos) p.pos = std::stod(s.substr(at + 1));
        } catch (const std::exception&) {
            throw InvalidInput("bad point '" + s + "' in --pairs");
        }
        return p;
    };
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw InvalidInput("pairs are written as edge:edge, got '" + item + "'");
        out.emplace_back(point(item.substr(0, colon)), point(item.substr(colon + 1)));
    }
    return out;
}

std::pair<int, int> parse_window(const std::string& spec) {
    auto colon = spec.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument(spec);
        int lo = std::stoi(spec.substr(0, colon)), hi = std::stoi(spec.substr(colon + 1));
        if (lo > hi) throw std::invalid_argument(spec);
        return {lo, hi};
    } catch (const std::exception&) {
        throw InvalidInput("window is written as qmin:qmax, got '" + spec + "'");
    }
}

int print_suite(const SuiteReport& r) {
    for (auto& line : r.lines) std::cout << r.name << '\t' << line << '\n';
    std::cout << r.name << '\t' << (r.ok ? "PASS" : "FAIL") << '\n';
    return r.ok ? exit_ok : exit_verification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Khovanov homology of links in connected sums of S2 x S1"};
    app.require_subcommand(1);

    CommonOptions common;

    std::string kh_file, format = "tsv";
    int hmin = -4;
    auto* kh = app.add_subcommand("kh", "stabilized homology table on [hmin, 0]");
    kh->add_option("file", kh_file, "diagram (JSON or PD, '-' for stdin)")->required();
    kh->add_option("--hmin", hmin, "lowest homological degree reported");
    kh->add_option("--format", format, "json, tsv or grid")->check(CLI::IsMember({"json", "tsv", "grid"}));
    add_common(kh, common);

    std::string suite, fixtures = KHMR_FIXTURES;
    int n = 2, k = 4;
    auto* verify = app.add_subcommand("verify", "run a self-check suite");
    verify->add_option("suite", suite, "twist, invariance, skein or knotify")
        ->required()
        ->check(CLI::IsMember({"twist", "invariance", "skein", "knotify"}));
    verify->add_option("--n", n, "strand count for the twist suite");
    verify->add_option("--k", k, "largest twist count for the twist suite");
    verify->add_option("--fixtures", fixtures, "directory of example diagrams");
    add_common(verify, common);

    std::string knot_file, pairs, out_file;
    auto* knot = app.add_subcommand("knotify", "join the components of a link by bands through new gates");
    knot->add_option("file", knot_file, "link diagram without gates")->required();
    knot->add_option("--pairs", pairs, "band endpoints as edge:edge[,edge:edge...]; default picks short bands");
    knot->add_option("-o,--output", out_file, "write the diagram here instead of stdout");

    std::string br_file, window, br_format = "tsv";
    auto* bracket = app.add_subcommand("bracket", "renormalized Kauffman bracket of a link in the 3-sphere");
    bracket->add_option("file", br_file, "diagram without gates")->required();
    bracket->add_option("--window", window, "exponent window qmin:qmax");
    bracket->add_option("--format", br_format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (*kh) {
            PipelineConfig cfg = make_config(common);
            MrDiagram d = parse_diagram(read_input(kh_file));
            if (d.name.empty()) d.name = kh_file;
            KhResult r = khovanov_homology(d, hmin, cfg);
            if (format == "json")
                std::cout << result_to_json(r).dump(2) << '\n';
            else if (format == "grid")
                std::cout << result_to_grid(r);
            else
                std::cout << result_to_tsv(r);
            return exit_ok;
        }
        if (*verify) {
            PipelineConfig cfg = make_config(common);
            if (suite == "twist") {
                if (n < 1 || n > 6) throw InvalidInput("--n must lie in 1..6");
                if (k < 1) throw InvalidInput("--k must be positive");
                return print_suite(verify_twist(n, k));
            }
            if (!std::filesystem::is_directory(fixtures)) throw InvalidInput("no fixture directory " + fixtures);
            if (suite == "invariance") return print_suite(verify_invariance(fixtures, cfg));
            if (suite == "skein") return print_suite(verify_skein(fixtures, cfg));
            return print_suite(verify_knotify(fixtures, cfg));
        }
        if (*knot) {
            MrDiagram d = parse_diagram(read_input(knot_file));
            if (d.r() != 0) throw InvalidInput("knotify expects a diagram without gates");
            std::string text = serialize(knotify(d, parse_pairs(pairs))) + "\n";
            if (out_file.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(out_file);
                if (!out) throw InvalidInput("cannot write " + out_file);
                out << text;
            }
            return exit_ok;
        }
        MrDiagram d = parse_diagram(read_input(br_file));
        LaurentWindow s = kauffman_bracket(d);
        if (!window.empty()) {
            auto [lo, hi] = parse_window(window);
            s = s.restricted(lo, hi);
        }
        if (br_format == "json")
            std::cout << series_to_json(s).dump(2) << '\n';
        else
            std::cout << series_to_tsv(s);
        return exit_ok;
    } catch (const ResourceError& e) {
        std::cerr << "resource ceiling: " << e.what() << '\n';
        if (auto* s = dynamic_cast<const StabilizationError*>(&e)) {
            KhResult a, b;
            a.table = s->last;
            b.table = s->previous;
            std::cerr << "last round:\n" << result_to_tsv(a) << "previous round:\n" << result_to_tsv(b);
        }
        return exit_resource;
    } catch (const InvalidInput& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_input;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_input;
    }
}
