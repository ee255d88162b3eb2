// Command-line surface: simulate / fit / sv / musa / dot. Artifacts are
// written atomically; failures print one machine-readable JSON line on stderr
// and exit nonzero.
#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "bnsv/error.hpp"
#include "bnsv/io.hpp"
#include "bnsv/musa.hpp"
#include "bnsv/simgen.hpp"

using namespace bnsv;

namespace {

// `--network mabs` resolves to the built-in fixture; anything else is a path.
NetworkFile resolve_network(const std::string& spec) {
    if (spec == "mabs") {
        MabsNetwork net = build_mabs_network();
        NetworkFile f;
        f.graph = std::move(net.graph);
        f.theta = std::move(net.theta);
        f.subgraphs = std::move(net.subgraphs);
        return f;
    }
    return load_network(spec);
}

std::vector<int> resolve_subgraph(const NetworkFile& net, const std::string& name) {
    const auto it = net.subgraphs.find(name);
    if (it == net.subgraphs.end())
        throw Error(errc::unknown_name, "network declares no subgraph '" + name + "'");
    std::vector<int> nodes;
    for (const auto& n : it->second) nodes.push_back(net.graph.index_of(n));
    return nodes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear-Gaussian process networks: Shapley sensitivity and "
                 "model-uncertainty attribution"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "generate batch data from a network");
    std::string sim_network = "mabs", sim_out, sim_subgraph;
    int sim_batches = 30, sim_incomplete = 0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--network", sim_network, "network file or 'mabs'");
    sim->add_option("--batches", sim_batches, "complete rows")->required();
    sim->add_option("--incomplete", sim_incomplete, "rows observed only on --subgraph");
    sim->add_option("--subgraph", sim_subgraph, "named top sub-graph for incomplete rows");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("-o,--out", sim_out, "output CSV")->required();

    // ---- fit ---------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "Gibbs-sample the coefficient posterior");
    std::string fit_network = "mabs", fit_data, fit_out;
    long fit_iters = 10500, fit_burnin = 500, fit_thin = 10;
    std::uint64_t fit_seed = 0;
    double fit_sigma0 = 1e6, fit_tau0 = 1e6, fit_kappa0 = 0.02, fit_lambda0 = 0.02;
    fit->add_option("--network", fit_network, "network file or 'mabs'");
    fit->add_option("--data", fit_data, "batch CSV")->required();
    fit->add_option("--iters", fit_iters, "total Gibbs iterations T");
    fit->add_option("--burnin", fit_burnin, "warm-up length T0");
    fit->add_option("--thin", fit_thin, "thinning step h");
    fit->add_option("--seed", fit_seed, "RNG seed");
    fit->add_option("--prior-sigma0sq", fit_sigma0, "prior variance of each mu");
    fit->add_option("--prior-tau0sq", fit_tau0, "prior variance of each beta");
    fit->add_option("--prior-kappa0", fit_kappa0, "inverse-gamma kappa0");
    fit->add_option("--prior-lambda0", fit_lambda0, "inverse-gamma lambda0");
    fit->add_option("-o,--out", fit_out, "output draws file")->required();

    // ---- sv ----------------------------------------------------------------
    auto* sv = app.add_subcommand("sv", "Shapley variance decomposition");
    std::string sv_network = "mabs", sv_draws, sv_output, sv_subgraph, sv_cov = "independent";
    std::string sv_data, sv_out;
    sv->add_option("--network", sv_network, "network file or 'mabs'");
    sv->add_option("--draws", sv_draws, "draws file: per-draw analysis, posterior summary out");
    sv->add_option("--output-node", sv_output, "output CQA/response")->required();
    sv->add_option("--subgraph", sv_subgraph, "restrict the analysis to a named sub-graph");
    sv->add_option("--cov", sv_cov, "independent | model | data")
        ->check(CLI::IsMember({"independent", "model", "data"}));
    sv->add_option("--data", sv_data, "batch CSV (required for --cov data)");
    sv->add_option("-o,--out", sv_out, "output report JSON")->required();

    // ---- musa --------------------------------------------------------------
    auto* musa = app.add_subcommand("musa", "model-uncertainty attribution (BN-SV-MU)");
    std::string mu_network = "mabs", mu_draws, mu_data, mu_input, mu_output, mu_out;
    std::string mu_quantity = "criticality";
    int mu_npi = 500, mu_bo = 5, mu_bi = 20, mu_thin = 5;
    std::uint64_t mu_seed = 0;
    musa->add_option("--network", mu_network, "network file or 'mabs'");
    musa->add_option("--draws", mu_draws, "posterior draws file")->required();
    musa->add_option("--data", mu_data, "batch CSV the draws were fit on")->required();
    musa->add_option("--input-factor", mu_input, "factor, e.g. X4 or e:X7")->required();
    musa->add_option("--output-node", mu_output, "output CQA/response")->required();
    musa->add_option("--quantity", mu_quantity, "shapley | criticality")
        ->check(CLI::IsMember({"shapley", "criticality"}));
    musa->add_option("--npi", mu_npi, "permutations N_pi");
    musa->add_option("--bo", mu_bo, "outer draws B_O");
    musa->add_option("--bi", mu_bi, "inner draws B_I");
    musa->add_option("--inner-thin", mu_thin, "inner thinning h");
    musa->add_option("--seed", mu_seed, "RNG seed");
    musa->add_option("-o,--out", mu_out, "output report JSON")->required();

    // ---- dot ---------------------------------------------------------------
    auto* dot = app.add_subcommand("dot", "annotated DOT export");
    std::string dot_network = "mabs", dot_sv, dot_mu, dot_out;
    dot->add_option("--network", dot_network, "network file or 'mabs'");
    dot->add_option("--sv", dot_sv, "sv report JSON")->required();
    dot->add_option("--mu", dot_mu, "mu report JSON (edge/boundary shading)");
    dot->add_option("-o,--out", dot_out, "output DOT file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            NetworkFile net = resolve_network(sim_network);
            if (!net.theta)
                throw Error(errc::invalid_theta, "network carries no full coefficient set");
            std::vector<int> sub;
            if (sim_incomplete > 0) {
                if (sim_subgraph.empty())
                    throw Error(errc::unknown_name, "--incomplete needs --subgraph");
                sub = resolve_subgraph(net, sim_subgraph);
            }
            const BatchDataset data = generate_batches(net.graph, *net.theta, sim_batches,
                                                       sim_incomplete, sub, sim_seed);
            atomic_write(sim_out, format_csv(net.graph, data));
        } else if (*fit) {
            NetworkFile net = resolve_network(fit_network);
            const BatchDataset data = load_data(fit_data, net.graph);
            Prior prior = default_prior(net.graph, &data);
            for (auto& v : prior.sigma0_sq) v = fit_sigma0;
            for (auto& v : prior.tau0_sq) v = fit_tau0;
            for (auto& v : prior.kappa0) v = fit_kappa0;
            for (auto& v : prior.lambda0) v = fit_lambda0;
            const PosteriorDraws draws =
                gibbs_sample(net.graph, prior, data, fit_iters, fit_burnin, fit_thin, fit_seed);
            atomic_write(fit_out, format_draws(net.graph, draws));
        } else if (*sv) {
            NetworkFile net = resolve_network(sv_network);
            const int output = net.graph.index_of(sv_output);
            if (!sv_draws.empty()) {
                const PosteriorDraws draws = load_draws(sv_draws, net.graph);
                const PosteriorSvSummary summary =
                    posterior_sv_summary(draws, net.graph, output);
                atomic_write(sv_out, dump_json(summary_to_json(net.graph, summary, draws)));
            } else {
                if (!net.theta)
                    throw Error(errc::invalid_theta,
                                "network carries no full coefficient set; use --draws");
                SvReport rep;
                if (!sv_subgraph.empty()) {
                    BatchDataset data;
                    BoundaryCov cov = BoundaryCov::model();
                    if (sv_cov == "independent") cov = BoundaryCov::independent();
                    if (sv_cov == "data") {
                        if (sv_data.empty())
                            throw Error(errc::empty_dataset, "--cov data needs --data");
                        data = load_data(sv_data, net.graph);
                        cov = BoundaryCov::from_data(data);
                        rep = subgraph_analysis(net.graph, *net.theta,
                                                resolve_subgraph(net, sv_subgraph), output, cov);
                    } else {
                        rep = subgraph_analysis(net.graph, *net.theta,
                                                resolve_subgraph(net, sv_subgraph), output, cov);
                    }
                } else if (sv_cov == "data") {
                    if (sv_data.empty())
                        throw Error(errc::empty_dataset, "--cov data needs --data");
                    const BatchDataset data = load_data(sv_data, net.graph);
                    rep = sv_closed_form(net.graph, *net.theta, output,
                                         covariance_from_data(net.graph, *net.theta, data));
                } else {
                    rep = sv_closed_form(net.graph, *net.theta, output);
                }
                atomic_write(sv_out, dump_json(sv_report_to_json(net.graph, rep)));
            }
        } else if (*musa) {
            NetworkFile net = resolve_network(mu_network);
            const BatchDataset data = load_data(mu_data, net.graph);
            const PosteriorDraws draws = load_draws(mu_draws, net.graph);
            const Prior prior = default_prior(net.graph, &data);
            MuOptions opts;
            opts.n_permutations = mu_npi;
            opts.outer_draws = mu_bo;
            opts.inner_draws = mu_bi;
            opts.inner_thin = mu_thin;
            opts.seed = mu_seed;
            const InputFactor input = parse_input_factor(net.graph, mu_input);
            const MuReport rep = appro_shapley_mu(
                net.graph, prior, data, draws, input, net.graph.index_of(mu_output),
                mu_quantity == "shapley" ? Quantity::Shapley : Quantity::Criticality, opts);
            atomic_write(mu_out, dump_json(mu_report_to_json(net.graph, rep)));
        } else if (*dot) {
            NetworkFile net = resolve_network(dot_network);
            const SvReport rep =
                sv_report_for_rendering(net.graph, nlohmann::json::parse(read_file(dot_sv)));
            MuReport mu_rep;
            const MuReport* mu_ptr = nullptr;
            if (!dot_mu.empty()) {
                mu_rep = mu_report_from_json(net.graph, nlohmann::json::parse(read_file(dot_mu)));
                mu_ptr = &mu_rep;
            }
            atomic_write(dot_out, export_dot(net.graph, rep, mu_ptr));
        }
    } catch (const Error& e) {
        nlohmann::json err{{"error", e.code()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "Internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
