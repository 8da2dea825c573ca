// skeltrop: exact-arithmetic toolkit for skeleta of curves — command line
// surface. Subcommands read a bundle JSON document from a file argument or
// stdin and write JSON (or DOT) to stdout. Exit codes: 0 success,
// 1 validation failure, 2 divergence, 3 parse error, 4 integrality error.

#include <CLI11.hpp>

#include "skeltrop/gallery.hpp"
#include "skeltrop/serialization.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kDivergence = 2;
constexpr int kParseError = 3;
constexpr int kIntegralityError = 4;

void diagnostic(const std::string& level, const std::string& message) {
    // Structured JSON lines on stderr.
    std::string escaped;
    for (char c : message) {
        if (c == '"' || c == '\\') escaped.push_back('\\');
        if (c == '\n') {
            escaped += "\\n";
            continue;
        }
        escaped.push_back(c);
    }
    std::cerr << "{\"level\":\"" << level << "\",\"message\":\"" << escaped << "\"}\n";
}


std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

std::string read_input(const std::string& path) {
    std::ostringstream buffer;
    if (path.empty() || path == "-") {
        buffer << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw skeltrop::ParseError("cannot open input file '" + path + "'");
        buffer << in.rdbuf();
    }
    return buffer.str();
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw skeltrop::Error("cannot open output file '" + out_path + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

int run_validate(const std::string& input, const std::string& out_path) {
    auto bundle = skeltrop::bundle_from_json(read_input(input));
    bool all_ok = true;
    std::ostringstream os;
    os << "{\"graphs\":{";
    bool first = true;
    for (const auto& [name, g] : bundle.graphs) {
        auto rep = skeltrop::validate_graph(g);
        all_ok = all_ok && rep.ok();
        os << (first ? "" : ",") << "\"" << json_escape(name) << "\":" << skeltrop::validation_report_to_json(rep);
        first = false;
    }
    os << "}";
    os << ",\"morphisms\":{";
    first = true;
    for (const auto& [name, m] : bundle.morphisms) {
        if (bundle.correspondence &&
            (name == bundle.correspondence->pi1 || name == bundle.correspondence->pi2 ||
             (bundle.correspondence->identification && name == *bundle.correspondence->identification)))
            continue; // reported through the correspondence below
        std::string verdict;
        try {
            auto f = skeltrop::normalize_morphism(bundle.graphs.at(m.source), bundle.graphs.at(m.target), m);
            verdict = skeltrop::morphism_report_to_json(f.report());
        } catch (const skeltrop::Error& e) {
            all_ok = false;
            verdict = std::string("{\"valid\":false,\"failures\":[\"") + e.what() + "\"]}";
        }
        os << (first ? "" : ",") << "\"" << json_escape(name) << "\":" << verdict;
        first = false;
    }
    os << "}";
    if (bundle.correspondence) {
        auto c = skeltrop::assemble_correspondence(bundle);
        auto rep = skeltrop::validate_correspondence(c);
        all_ok = all_ok && rep.ok();
        os << ",\"correspondence\":" << skeltrop::correspondence_report_to_json(rep);
    }
    os << "}";
    write_output(out_path, os.str());
    if (!all_ok) {
        diagnostic("error", "validation failed");
        return kValidationFailure;
    }
    return kOk;
}

int run_invariants(const std::string& input, const std::string& out_path) {
    auto bundle = skeltrop::bundle_from_json(read_input(input));
    if (bundle.graphs.size() == 1) {
        write_output(out_path, skeltrop::invariants_to_json(skeltrop::invariants(bundle.graphs.begin()->second)));
        return kOk;
    }
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [name, g] : bundle.graphs) {
        os << (first ? "" : ",") << "\"" << json_escape(name) << "\":" << skeltrop::invariants_to_json(skeltrop::invariants(g));
        first = false;
    }
    os << "}";
    write_output(out_path, os.str());
    return kOk;
}

int run_linearize(const std::string& input, const std::string& out_path) {
    auto bundle = skeltrop::bundle_from_json(read_input(input));
    if (bundle.graphs.size() == 1) {
        write_output(out_path, skeltrop::linearization_to_json(bundle.graphs.begin()->second));
        return kOk;
    }
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [name, g] : bundle.graphs) {
        os << (first ? "" : ",") << "\"" << json_escape(name) << "\":" << skeltrop::linearization_to_json(g);
        first = false;
    }
    os << "}";
    write_output(out_path, os.str());
    return kOk;
}

int run_stabilize(const std::string& input, const std::string& out_path, unsigned max_iter, bool trace) {
    auto bundle = skeltrop::bundle_from_json(read_input(input));
    auto c = skeltrop::assemble_correspondence(bundle);
    auto outcome = skeltrop::stabilize(c, max_iter);
    if (trace) {
        for (std::size_t k = 0; k < outcome.added_points_per_iteration.size(); ++k) {
            std::cerr << "{\"iteration\":" << (k + 1)
                      << ",\"added\":" << outcome.added_points_per_iteration[k].str()
                      << ",\"min_spacing\":\"" << outcome.min_spacing_per_iteration[k].fraction_str()
                      << "\"}\n";
        }
    }
    write_output(out_path, skeltrop::outcome_to_json(outcome));
    if (outcome.status == skeltrop::StabilizationStatus::Diverged) {
        diagnostic("error", "stabilization diverged at iteration cap " + std::to_string(max_iter));
        return kDivergence;
    }
    return kOk;
}

int run_operator(const std::string& input, const std::string& out_path) {
    auto bundle = skeltrop::bundle_from_json(read_input(input));
    auto c = skeltrop::assemble_correspondence(bundle);
    auto op = skeltrop::correspondence_operator(c);
    write_output(out_path, skeltrop::operator_bundle_to_json(op));
    return kOk;
}

int run_dot(const std::string& input, const std::string& out_path) {
    auto bundle = skeltrop::bundle_from_json(read_input(input));
    write_output(out_path, skeltrop::bundle_to_dot(bundle));
    return kOk;
}

skeltrop::Bundle gallery_bundle(const std::string& name, unsigned n, unsigned p, unsigned l,
                                unsigned s) {
    using namespace skeltrop;
    if (name == "genus-one") return bundle_of_graph("genus_one", gallery::example_genus_one());
    if (name == "tate-isogeny") {
        auto f = gallery::tate_isogeny(n);
        return bundle_of_morphism("tate_isogeny", f.source(), f.target(), f.data());
    }
    if (name == "tate-pair") return bundle_of_correspondence(gallery::tate_pair());
    if (name == "hecke-tl") {
        if (l == 2 && s == 2) return bundle_of_correspondence(gallery::hecke_Tl_default());
        return bundle_of_correspondence(gallery::hecke_Tl(l, s, gallery::hecke_Tl_synthetic_table(l, s)));
    }
    if (name == "hecke-up") return bundle_of_correspondence(gallery::hecke_Up(p, s));
    if (name == "divergent-demo") return bundle_of_correspondence(gallery::divergent_demo(p));
    throw skeltrop::ParameterError("unknown gallery fixture '" + name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic toolkit for skeleta of curves and their correspondences"};
    app.require_subcommand(1);

    std::string input, out_path;
    unsigned max_iter = 64;
    bool trace = false;
    std::string format = "json";

    auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("input", input, "bundle JSON file ('-' or omitted: stdin)");
        cmd->add_option("--out", out_path, "output file (default: stdout)");
    };

    auto* validate = app.add_subcommand("validate", "validate every document in a bundle");
    add_io(validate);
    auto* invariants_cmd = app.add_subcommand("invariants", "graph invariants (genus, Euler characteristic, ...)");
    add_io(invariants_cmd);
    auto* stabilize_cmd = app.add_subcommand("stabilize", "close the vertex sets of a correspondence");
    add_io(stabilize_cmd);
    stabilize_cmd->add_option("--max-iter", max_iter, "iteration cap")->default_val(64u);
    stabilize_cmd->add_flag("--trace", trace, "per-iteration diagnostics on stderr");
    auto* linearize_cmd = app.add_subcommand("linearize", "cycle lattice, pairing and component group per graph");
    add_io(linearize_cmd);
    auto* operator_cmd = app.add_subcommand("operator", "linearize a skeletal correspondence");
    add_io(operator_cmd);
    auto* dot_cmd = app.add_subcommand("dot", "DOT rendering of a bundle");
    add_io(dot_cmd);

    auto* gallery_cmd = app.add_subcommand("gallery", "emit a named fixture as a bundle");
    std::string fixture;
    unsigned n = 3, p = 5, l = 2, s = 2;
    gallery_cmd->add_option("name", fixture,
                            "genus-one | tate-isogeny | tate-pair | hecke-tl | hecke-up | divergent-demo")
        ->required();
    gallery_cmd->add_option("--n", n, "degree parameter (tate-isogeny)");
    gallery_cmd->add_option("--p", p, "prime parameter (hecke-up, divergent-demo)");
    gallery_cmd->add_option("--l", l, "second prime's norm (hecke-tl)");
    gallery_cmd->add_option("--s", s, "supersingular point count (hecke-tl, hecke-up)");
    gallery_cmd->add_option("--out", out_path, "output file (default: stdout)");
    std::string dot_format;
    gallery_cmd->add_option("--format", dot_format, "json | dot")->default_val("json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(input, out_path);
        if (invariants_cmd->parsed()) return run_invariants(input, out_path);
        if (stabilize_cmd->parsed()) return run_stabilize(input, out_path, max_iter, trace);
        if (linearize_cmd->parsed()) return run_linearize(input, out_path);
        if (operator_cmd->parsed()) return run_operator(input, out_path);
        if (dot_cmd->parsed()) return run_dot(input, out_path);
        if (gallery_cmd->parsed()) {
            auto bundle = gallery_bundle(fixture, n, p, l, s);
            if (dot_format == "dot")
                write_output(out_path, skeltrop::bundle_to_dot(bundle));
            else
                write_output(out_path, skeltrop::bundle_to_json(bundle));
            return kOk;
        }
    } catch (const skeltrop::ParseError& e) {
        diagnostic("error", e.what());
        return kParseError;
    } catch (const skeltrop::IntegralityError& e) {
        diagnostic("error", e.what());
        return kIntegralityError;
    } catch (const skeltrop::Error& e) {
        diagnostic("error", e.what());
        return kValidationFailure;
    } catch (const std::exception& e) {
        diagnostic("error", e.what());
        return kValidationFailure;
    }
    return kOk;
}
