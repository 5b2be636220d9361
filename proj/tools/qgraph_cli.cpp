#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qgraph/qgraph.hpp"

using namespace qgraph;

namespace {

struct Flags {
    std::string graph, graph2, out, suite = "all";
    double kmax = 20, theta = 0;
    int vertex = 0, vertex2 = 0, grid = 128, resolution = 64, index = -1;
    bool theta_set = false;
    std::uint64_t seed = 1;
};

void emit(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(f.out);
    if (!out) throw InvalidInputError("cannot write " + f.out);
    out << text;
}

GraphFile standard_graph(const Flags& f) {
    GraphFile g = load_graph(f.graph);
    for (const auto& c : g.conditions)
        if (c.kind() != VertexCondition::Kind::neumann)
            throw InvalidInputError("this command needs standard conditions at every vertex");
    return g;
}

int spectrum(const Flags& f) {
    MetricGraph m = load_graph(f.graph).metric();
    if (f.theta_set) m = marked(m, f.vertex, f.theta);
    emit(f, spectrum_csv(eigenvalues(m, f.kmax)));
    return 0;
}

int eigenfunction(const Flags& f) {
    MetricGraph m = load_graph(f.graph).metric();
    if (f.theta_set) m = marked(m, f.vertex, f.theta);
    Eigenpair p;
    if (f.index < 0) {
        p = gap_eigenpair(m);
    } else {
        Spectrum s = eigenvalues(m, f.kmax, true);
        if (f.index >= static_cast<int>(s.pairs.size())) throw InvalidInputError("no eigenvalue with that index below kmax");
        p = s.pairs[f.index];
    }
    if (p.basis.empty()) throw NoEigenspaceError("no eigenfunction found");
    emit(f, eigenfunction_csv(m, p.basis[0], f.resolution));
    return 0;
}

int optimize(const Flags& f) {
    GraphFile g = standard_graph(f);
    OptimizeOptions opt;
    opt.seed = f.seed;
    emit(f, to_json(maximize_gap(g.graph, g.lengths, opt)).dump(2) + "\n");
    return 0;
}

int infimum(const Flags& f) {
    GraphFile g = standard_graph(f);
    emit(f, to_json(infimize_gap(g.graph)).dump(2) + "\n");
    return 0;
}

int dispersion(const Flags& f) {
    emit(f, dispersion_csv(dispersion_curve(standard_graph(f).metric(), f.vertex, f.grid)));
    return 0;
}

int sgp(const Flags& f) {
    emit(f, to_json(spectral_gap_parameter(standard_graph(f).metric(), f.vertex)).dump(2) + "\n");
    return 0;
}

int glue_command(const Flags& f) {
    MetricGraph m1 = standard_graph(f).metric();
    Flags second = f;
    second.graph = f.graph2;
    MetricGraph m2 = standard_graph(second).metric();
    emit(f, to_json(gluing_bound_check(m1, f.vertex, m2, f.vertex2)).dump(2) + "\n");
    return 0;
}

int verify_command(const Flags& f) {
    if (f.suite != "catalog" && f.suite != "acceptance" && f.suite != "all")
        throw InvalidInputError("unknown suite '" + f.suite + "'");
    std::vector<verify::CriterionResult> results;
    if (f.suite != "acceptance") results = verify::catalog_suite();
    if (f.suite != "catalog")
        for (const auto& criterion : verify::acceptance_suite()) {
            try {
                results.push_back(criterion());
            } catch (const Error& e) {
                results.push_back({"?", "criterion raised", false, e.what()});
            }
        }
    std::string report;
    int failed = 0;
    for (const auto& r : results) {
        report += verify::format_line(r) + "\n";
        failed += r.passed ? 0 : 1;
    }
    report += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " passed\n";
    emit(f, report);
    return failed == 0 ? 0 : 1;
}

int catalog(const Flags& f) {
    std::string r = "name,vertices,edges,gap\n";
    for (const auto& e : default_catalog()) {
        const DiscreteGraph g = e.graph();
        r += e.name() + "," + std::to_string(g.vertex_count()) + "," + std::to_string(g.edge_count()) + "," +
             fmt12(catalog_gap(e)) + "\n";
    }
    emit(f, r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral gap of metric graphs"};
    app.require_subcommand(1);
    Flags f;

    auto graph_opt = [&](CLI::App* c) { c->add_option("--graph", f.graph, "graph JSON file")->required()->check(CLI::ExistingFile); };
    auto out_opt = [&](CLI::App* c) { c->add_option("--out", f.out, "output file (default stdout)"); };
    auto theta_opt = [&](CLI::App* c) {
        c->add_option("--vertex", f.vertex, "vertex carrying the delta condition");
        c->add_option("--theta", f.theta, "delta parameter")->each([&](const std::string&) { f.theta_set = true; });
    };

    auto* spec = app.add_subcommand("spectrum", "eigenvalues below kmax as CSV");
    graph_opt(spec);
    spec->add_option("--kmax", f.kmax, "wavenumber cutoff")->check(CLI::PositiveNumber);
    theta_opt(spec);
    out_opt(spec);

    auto* eig = app.add_subcommand("eigenfunction", "sampled eigenfunction as CSV");
    graph_opt(eig);
    eig->add_option("--index", f.index, "eigenvalue index (default: the gap)");
    eig->add_option("--kmax", f.kmax, "wavenumber cutoff for --index")->check(CLI::PositiveNumber);
    eig->add_option("--resolution", f.resolution, "intervals per edge")->check(CLI::PositiveNumber);
    theta_opt(eig);
    out_opt(eig);

    auto* opt = app.add_subcommand("optimize", "maximize the gap over edge lengths");
    graph_opt(opt);
    opt->add_option("--seed", f.seed, "random seed");
    out_opt(opt);

    auto* inf = app.add_subcommand("infimum", "infimum of the gap over edge lengths");
    graph_opt(inf);
    out_opt(inf);

    auto* disp = app.add_subcommand("dispersion", "k_n(theta) at a vertex as CSV");
    graph_opt(disp);
    disp->add_option("--vertex", f.vertex, "vertex");
    disp->add_option("--grid", f.grid, "number of theta samples")->check(CLI::Range(64, 1 << 20));
    out_opt(disp);

    auto* sg = app.add_subcommand("sgp", "spectral gap parameter report");
    graph_opt(sg);
    sg->add_option("--vertex", f.vertex, "vertex");
    out_opt(sg);

    auto* gl = app.add_subcommand("glue", "gluing bound check for two graphs");
    graph_opt(gl);
    gl->add_option("--graph2", f.graph2, "second graph JSON file")->required()->check(CLI::ExistingFile);
    gl->add_option("--vertex", f.vertex, "gluing vertex of the first graph");
    gl->add_option("--vertex2", f.vertex2, "gluing vertex of the second graph");
    out_opt(gl);

    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("--suite", f.suite, "catalog, acceptance or all");
    out_opt(ver);

    auto* cat = app.add_subcommand("catalog", "closed-form gaps of the built-in catalog");
    out_opt(cat);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (spec->parsed()) return spectrum(f);
        if (eig->parsed()) return eigenfunction(f);
        if (opt->parsed()) return optimize(f);
        if (inf->parsed()) return infimum(f);
        if (disp->parsed()) return dispersion(f);
        if (sg->parsed()) return sgp(f);
        if (gl->parsed()) return glue_command(f);
        if (ver->parsed()) return verify_command(f);
        if (cat->parsed()) return catalog(f);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
