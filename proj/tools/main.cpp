// Command-line front end: `run` executes the simulation protocol and writes
// an accuracy CSV, `inspect` dumps one instance with a correct/incorrect
// hyper-edge comparison, `resultant` scores a polynomial pair directly.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "resmatch/resmatch.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

resmatch::MinimalProblemKind parse_problem(const std::string& name) {
    if (name == "p3p") return resmatch::MinimalProblemKind::kP3p;
    if (name == "3p1") return resmatch::MinimalProblemKind::kThreePlusOne;
    return resmatch::MinimalProblemKind::kUp2p;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

struct RunOptions {
    std::string problem = "p3p";
    int n = 10;
    std::vector<double> sigmas{0.0};
    std::vector<int> outliers{0};
    double baseline = 1.0;
    int motions = 1;
    int instances = 100;
    int samples_max = 0;  // 0: per-problem default
    double rho = 0.0;  // 0: per-problem default
    std::string solver = "sparse";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
};

int do_run(const RunOptions& opt) {
    resmatch::ExperimentConfig cfg;
    cfg.kind = parse_problem(opt.problem);
    cfg.n = opt.n;
    cfg.sigmas = opt.sigmas;
    cfg.outlier_counts = opt.outliers;
    cfg.baseline = opt.baseline;
    cfg.motions = opt.motions;
    cfg.instances = opt.instances;
    cfg.rho = opt.rho;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    const int max_samples =
        opt.samples_max > 0 ? opt.samples_max : resmatch::default_max_samples(cfg.kind);
    cfg.schedule = resmatch::default_schedule(max_samples);
    if (opt.solver == "sparse")
        cfg.solvers = {resmatch::SolverKind::kSparse};
    else if (opt.solver == "dense")
        cfg.solvers = {resmatch::SolverKind::kDense};
    else
        cfg.solvers = {resmatch::SolverKind::kSparse, resmatch::SolverKind::kDense};

    std::vector<resmatch::CellResult> results;
    try {
        results = resmatch::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitUsage;
    }

    std::ostringstream csv;
    csv << "problem,solver,sigma,outliers,baseline,motions,samples,mean_accuracy,std_accuracy,"
           "instances,seed\n";
    for (const auto& cell : results) {
        for (const auto& row : cell.curve.rows) {
            csv << opt.problem << ',' << resmatch::to_string(cell.solver) << ','
                << format_double(cell.sigma) << ',' << cell.outliers << ','
                << format_double(opt.baseline) << ',' << opt.motions << ',' << row.samples << ','
                << format_double(row.mean_accuracy) << ',' << format_double(row.std_accuracy)
                << ',' << opt.instances << ',' << opt.seed << '\n';
        }
    }

    std::ofstream file(opt.out, std::ios::binary);
    if (!file) {
        std::cerr << "cannot open output file: " << opt.out << "\n";
        return kExitIo;
    }
    file << csv.str();
    file.flush();
    if (!file) {
        std::cerr << "failed writing output file: " << opt.out << "\n";
        return kExitIo;
    }
    return kExitOk;
}

struct InspectOptions {
    std::string problem = "p3p";
    int n = 10;
    double sigma = 0.0;
    int outliers = 0;
    double baseline = 1.0;
    int motions = 1;
    double rho = 0.0;
    std::uint64_t seed = 0;
};

void print_polynomial(std::ostream& os, const char* label, const resmatch::Polynomial& p) {
    double sq = 0.0;
    os << "    " << label << " coefficients:";
    for (double c : p.coeffs()) {
        os << ' ' << format_double(c);
        sq += c * c;
    }
    os << "\n    " << label << " coefficient norm: " << format_double(std::sqrt(sq)) << "\n";
}

void print_edge_report(std::ostream& os, const char* label, resmatch::MinimalProblemKind kind,
                       const resmatch::ProblemInstance& inst, const resmatch::EdgeTuple& edge,
                       double rho, double& resultant_out) {
    os << "  " << label << " hyper-edge:";
    for (int k = 0; k < edge.order; ++k) os << " (" << edge.rows[k] << "," << edge.cols[k] << ")";
    os << "\n";
    const auto [qs, qsp] = resmatch::minimal_set_polynomials(kind, inst, edge);
    print_polynomial(os, "q_S ", qs);
    print_polynomial(os, "q_S'", qsp);
    resultant_out = resmatch::resultant_magnitude_qr(resmatch::sylvester(qs, qsp));
    os << "    resultant magnitude (qr): " << format_double(resultant_out) << "\n";
    os << "    affinity exp(-r/rho):     " << format_double(std::exp(-resultant_out / rho)) << "\n";
}

int do_inspect(const InspectOptions& opt) {
    resmatch::ExperimentConfig cfg;
    cfg.kind = parse_problem(opt.problem);
    cfg.n = opt.n;
    cfg.baseline = opt.baseline;
    cfg.motions = opt.motions;
    cfg.seed = opt.seed;

    const int order = resmatch::hyper_edge_order(cfg.kind);
    if (cfg.n < order + 1) {
        std::cerr << "--n must be at least " << order + 1 << " for " << opt.problem << "\n";
        return kExitUsage;
    }
    const double rho = opt.rho > 0.0 ? opt.rho : resmatch::default_rho(cfg.kind);

    resmatch::Rng rng = resmatch::Rng::stream(opt.seed, 0);
    resmatch::ProblemInstance inst;
    try {
        inst = resmatch::corrupt(resmatch::generate_instance(cfg, rng), opt.sigma, opt.outliers, rng);
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitUsage;
    }

    std::ostream& os = std::cout;
    os << "problem: " << opt.problem << "  n: " << cfg.n << "  sigma: " << format_double(opt.sigma)
       << "  outliers: " << opt.outliers << "  seed: " << opt.seed << "\n";
    for (std::size_t c = 0; c < inst.cameras.size(); ++c) {
        const auto& cam = inst.cameras[c];
        os << "camera " << c << ": center (" << format_double(cam.center.x()) << ", "
           << format_double(cam.center.y()) << ", " << format_double(cam.center.z()) << ")"
           << "  f: " << format_double(cam.intrinsics.fu) << "\n";
    }
    os << "3d points:\n";
    for (std::size_t i = 0; i < inst.points3d.size(); ++i) {
        const auto& p = inst.points3d[i];
        os << "  [" << i << "] (" << format_double(p.x()) << ", " << format_double(p.y()) << ", "
           << format_double(p.z()) << ")";
        if (!inst.motion_labels.empty()) os << "  motion " << inst.motion_labels[i];
        os << "\n";
    }
    for (std::size_t v = 0; v < inst.observations.size(); ++v) {
        os << "image " << v << " points:\n";
        for (std::size_t i = 0; i < inst.observations[v].size(); ++i) {
            const auto& u = inst.observations[v][i];
            os << "  [" << i << "] (" << format_double(u.x()) << ", " << format_double(u.y())
               << ")\n";
        }
    }
    os << "ground truth (row -> column):";
    for (std::size_t i = 0; i < inst.ground_truth.size(); ++i)
        os << ' ' << i << "->" << inst.ground_truth[i];
    os << "\n";

    // A fully correct tuple against the same tuple with one wrong column.
    resmatch::EdgeTuple correct;
    correct.order = order;
    for (int k = 0; k < order; ++k) {
        correct.rows[k] = k;
        correct.cols[k] = inst.ground_truth[static_cast<std::size_t>(k)];
    }
    resmatch::EdgeTuple wrong = correct;
    wrong.cols[order - 1] = inst.ground_truth[static_cast<std::size_t>(order)];

    double r_correct = 0.0, r_wrong = 0.0;
    print_edge_report(os, "correct", cfg.kind, inst, correct, rho, r_correct);
    print_edge_report(os, "incorrect", cfg.kind, inst, wrong, rho, r_wrong);
    os << "correct resultant < incorrect resultant: " << (r_correct < r_wrong ? "yes" : "no")
       << "\n";
    return kExitOk;
}

int do_resultant(const std::vector<double>& p, const std::vector<double>& q,
                 const std::string& backend) {
    if (p.size() != q.size()) {
        std::cerr << "--p and --q must have the same degree\n";
        return kExitUsage;
    }
    if (p.size() < 2) {
        std::cerr << "polynomials must have degree at least 1\n";
        return kExitUsage;
    }
    try {
        const resmatch::Polynomial pn = resmatch::normalize(resmatch::Polynomial(p));
        const resmatch::Polynomial qn = resmatch::normalize(resmatch::Polynomial(q));
        const auto kind = backend == "svd" ? resmatch::ResultantBackend::kSvd
                                           : resmatch::ResultantBackend::kQr;
        std::cout << std::setprecision(17) << resmatch::resultant_magnitude(pn, qn, kind) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "invalid polynomials: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature-free geometric correspondence via polynomial resultants"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "Run the simulation protocol and write a CSV");
    run->add_option("--problem", run_opt.problem)->check(CLI::IsMember({"p3p", "3p1", "up2p"}));
    run->add_option("--n", run_opt.n, "inlier points per instance")->check(CLI::PositiveNumber);
    run->add_option("--sigma", run_opt.sigmas, "noise levels in pixels")->delimiter(',');
    run->add_option("--outliers", run_opt.outliers, "outlier counts")->delimiter(',');
    run->add_option("--baseline", run_opt.baseline, "3p1 stereo baseline")->check(CLI::PositiveNumber);
    run->add_option("--motions", run_opt.motions, "up2p motion count")->check(CLI::Range(1, 2));
    run->add_option("--instances", run_opt.instances)->check(CLI::PositiveNumber);
    run->add_option("--samples-max", run_opt.samples_max, "largest sample size (0: per-problem default)");
    run->add_option("--rho", run_opt.rho, "affinity spread (0: per-problem default)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--solver", run_opt.solver)->check(CLI::IsMember({"sparse", "dense", "both"}));
    run->add_option("--seed", run_opt.seed);
    run->add_option("--threads", run_opt.threads)->check(CLI::PositiveNumber);
    run->add_option("--out", run_opt.out, "output CSV path")->required();

    InspectOptions ins_opt;
    CLI::App* inspect = app.add_subcommand("inspect", "Print one instance and an edge comparison");
    inspect->add_option("--problem", ins_opt.problem)->check(CLI::IsMember({"p3p", "3p1", "up2p"}));
    inspect->add_option("--n", ins_opt.n)->check(CLI::PositiveNumber);
    inspect->add_option("--sigma", ins_opt.sigma)->check(CLI::NonNegativeNumber);
    inspect->add_option("--outliers", ins_opt.outliers)->check(CLI::NonNegativeNumber);
    inspect->add_option("--baseline", ins_opt.baseline)->check(CLI::PositiveNumber);
    inspect->add_option("--motions", ins_opt.motions)->check(CLI::Range(1, 2));
    inspect->add_option("--rho", ins_opt.rho, "affinity spread (0: per-problem default)")
        ->check(CLI::NonNegativeNumber);
    inspect->add_option("--seed", ins_opt.seed);

    std::vector<double> res_p, res_q;
    std::string res_backend = "qr";
    CLI::App* resultant = app.add_subcommand("resultant", "Resultant magnitude of a normalized pair");
    resultant->add_option("--p", res_p, "coefficients, descending degree")->delimiter(',')->required();
    resultant->add_option("--q", res_q, "coefficients, descending degree")->delimiter(',')->required();
    resultant->add_option("--backend", res_backend)->check(CLI::IsMember({"qr", "svd"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // help request
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    if (run->parsed()) return do_run(run_opt);
    if (inspect->parsed()) return do_inspect(ins_opt);
    return do_resultant(res_p, res_q, res_backend);
}
