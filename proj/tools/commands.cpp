#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "kspec/bounds.hpp"
#include "kspec/calculus.hpp"
#include "kspec/errors.hpp"
#include "kspec/estimator.hpp"
#include "kspec/geometry.hpp"
#include "kspec/io.hpp"

namespace kspec::cli {

namespace {

using io::json;

constexpr double kDefaultTol = 1e-8;
constexpr int kDefaultQuadNodes = 256;
constexpr int kMaxQuadNodes = 1 << 16;
constexpr double kDefaultMarginCli = 1e-6;

// Thresholds of the verify suite.
constexpr double kPartitionTol = 1e-10;
constexpr double kPositivityTol = 1e-12;
constexpr double kDominationTol = 1e-10;
constexpr double kEnvelopeTol = 1e-8;
constexpr int kKernelNodes = 64;

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::ParseError("cannot write " + path);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_radius(double R) {
    if (!(R > 1.0) || !std::isfinite(R)) throw DomainError("R must be a finite number above 1");
}

std::vector<double> parse_range(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw io::ParseError("--R-range expects a:b:n");
    double a = 0.0, b = 0.0;
    long n = 0;
    try {
        std::size_t pos = 0;
        a = std::stod(parts[0], &pos);
        if (pos != parts[0].size()) throw std::invalid_argument("a");
        b = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument("b");
        n = std::stol(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument("n");
    } catch (const std::exception&) {
        throw io::ParseError("--R-range expects numbers a:b:n");
    }
    if (n < 1) throw io::ParseError("--R-range needs n >= 1");
    require_radius(a);
    require_radius(b);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    // Geometric spacing resolves the region near R = 1.
    for (long i = 0; i < n; ++i) {
        const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back(i == n - 1 ? b : a * std::pow(b / a, s));
    }
    return out;
}

json check(const std::string& name, double residual, double threshold, bool pass) {
    return {{"name", name}, {"residual", residual}, {"threshold", threshold}, {"pass", pass}};
}

// ------------------------------------------------------------------ commands

int cmd_classify(const std::string& p1, const std::string& p2, double tol, const std::string& output,
                 std::ostream& out) {
    const SphereDisk d1 = io::disk_from_json(io::parse_text(io::read_file(p1)));
    const SphereDisk d2 = io::disk_from_json(io::parse_text(io::read_file(p2)));
    try {
        const Classification c = classify(d1, d2, tol);
        json j = io::classification_to_json(c);
        j["tol"] = tol;
        emit(dump(j), output, out);
        return kOk;
    } catch (const AmbiguousClassification& e) {
        json j = {{"error", "ambiguous"},
                  {"message", e.what()},
                  {"candidates", json::array({std::string(to_string(e.first())), std::string(to_string(e.second()))})},
                  {"tol", tol}};
        emit(dump(j), output, out);
        throw;
    }
}

int cmd_certify(const std::string& disk_path, const std::string& matrix_path, const std::string& output,
                std::ostream& out) {
    const SphereDisk d = io::disk_from_json(io::parse_text(io::read_file(disk_path)));
    const Matrix a = io::matrix_from_json(io::parse_text(io::read_file(matrix_path)));
    const SpectralCertificate cert = certify_spectral_detail(d, a);
    json j = {{"disk", io::disk_to_json(d)},
              {"n", a.size()},
              {"spectral", cert.spectral},
              {"singular_shift", cert.singular_shift},
              {"measured", cert.measured},
              {"threshold", cert.threshold}};
    emit(dump(j), output, out);
    return kOk;
}

int cmd_bounds(const std::vector<double>& R_list, const std::string& range, double tail_tol,
               const std::string& output, std::ostream& out) {
    std::vector<double> Rs = R_list;
    if (!range.empty()) {
        const auto more = parse_range(range);
        Rs.insert(Rs.end(), more.begin(), more.end());
    }
    if (Rs.empty()) throw io::ParseError("give --R or --R-range");
    const auto rows = bounds::curve_table(Rs, tail_tol);
    emit(io::bounds_csv(rows), output, out);
    return kOk;
}

struct VerifyOptions {
    std::string matrix_path;
    std::vector<long long> random;  // n, seed
    double R = 0.0;
    double tol = kDefaultTol;
    int quad_nodes = kDefaultQuadNodes;
    double margin = kDefaultMarginCli;
    std::string output;
};

std::vector<std::pair<std::string, RationalFunction>> verify_battery(double R, std::uint64_t seed) {
    std::mt19937_64 rng(estimator::splitmix64(seed ^ 0x5EEDULL));
    return {
        {"z", RationalFunction::polynomial({0.0, 1.0})},
        {"1/z", RationalFunction::laurent(-1, {1.0})},
        {"z^3+2z^-2", RationalFunction::laurent(-2, {2.0, 0.0, 0.0, 0.0, 0.0, 1.0})},
        {"(z+1)/(z-2R)", RationalFunction({1.0, 1.0}, {-2.0 * R, 1.0})},
        {"1/(z-1/(2R))", RationalFunction({1.0}, {-0.5 / R, 1.0})},
        {"random_laurent_4", estimator::random_laurent(4, R, rng)},
    };
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
    require_radius(o.R);
    if (!(o.tol > 0.0)) throw io::ParseError("--tol must be positive");
    if (!(o.margin > 0.0 && o.margin < 0.5)) throw io::ParseError("--margin must lie in (0, 0.5)");
    QuadratureConfig q;
    q.nodes = o.quad_nodes;
    q.tol = std::min(o.tol, kPartitionTol) * 1e-2;
    q.max_nodes = std::max(kMaxQuadNodes, o.quad_nodes);
    q.validate();

    Matrix a;
    std::uint64_t seed = 0;
    json source;
    if (!o.random.empty()) {
        if (o.random.size() != 2 || o.random[0] < 1 || o.random[1] < 0)
            throw io::ParseError("--random expects n >= 1 and seed >= 0");
        seed = static_cast<std::uint64_t>(o.random[1]);
        a = estimator::random_admissible(static_cast<std::size_t>(o.random[0]), o.R, seed);
        source = {{"random", {{"n", o.random[0]}, {"seed", o.random[1]}}}};
    } else {
        a = io::matrix_from_json(io::parse_text(io::read_file(o.matrix_path)));
        source = {{"matrix", o.matrix_path}};
    }

    const double norm = spectral_norm(a);
    double inv_norm = 0.0;
    try {
        inv_norm = spectral_norm(inverse(a));
    } catch (const SingularMatrix&) {
        inv_norm = std::numeric_limits<double>::infinity();
    }
    const double worst = std::max(norm, inv_norm);
    if (!(worst <= o.R * (1.0 + 1e-9))) {
        json j = {{"error", "inadmissible"}, {"R", o.R}, {"norm", norm},
                  {"inverse_norm", std::isfinite(inv_norm) ? json(inv_norm) : json("inf")}};
        emit(dump(j), o.output, out);
        throw AdmissibilityError("operator norms exceed R", norm, inv_norm, o.R);
    }
    // Operators on (or within the margin of) the boundary are studied on a
    // slightly larger annulus, so the kernels stay bounded.
    const double R_eff = std::max(o.R, worst / (1.0 - o.margin));
    const AnnulusContext ctx = AnnulusContext::make(a, R_eff, o.margin);
    const std::size_t n = a.size();
    const Matrix id = Matrix::identity(n);

    json checks = json::array();
    bool all = true;
    auto add = [&](const std::string& name, double residual, double threshold, bool pass) {
        checks.push_back(check(name, residual, threshold, pass));
        all = all && pass;
    };

    const auto outer = integrate_mu(ctx, true, q);
    const double part_outer = spectral_norm(outer.value - id);
    add("partition_outer", part_outer, kPartitionTol, part_outer <= kPartitionTol);
    const auto inner = integrate_mu(ctx, false, q);
    const double part_inner = spectral_norm(inner.value - id);
    add("partition_inner", part_inner, kPartitionTol, part_inner <= kPartitionTol);

    double min_mu = std::numeric_limits<double>::infinity();
    double min_dom = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kKernelNodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / kKernelNodes;
        min_mu = std::min(min_mu, hermitian_eigen(kernel_mu(ctx, theta, ctx.a())).values.front());
        min_mu = std::min(min_mu, hermitian_eigen(kernel_mu(ctx, -theta, ctx.a_inv())).values.front());
        const Matrix diff = kernel_M(ctx, theta).hermitian_part() - kernel_N(ctx, theta);
        min_dom = std::min(min_dom, hermitian_eigen(diff).values.front());
    }
    add("kernel_positivity", min_mu, -kPositivityTol, min_mu >= -kPositivityTol);
    add("kernel_domination", min_dom, -kDominationTol, min_dom >= -kDominationTol);

    RepresentationQuadrature rq(ctx, q);
    json battery = json::array();
    double worst_rel = 0.0;
    for (const auto& [name, f] : verify_battery(R_eff, seed)) {
        const auto rep = rq.integrate(f);
        const Matrix direct = eval_matrix(f, a);
        const double scale = std::max(1.0, sup_norm_annulus(f, R_eff));
        const double rel = spectral_norm(rep.value - direct) / scale;
        worst_rel = std::max(worst_rel, rel);
        battery.push_back({{"f", name}, {"residual", rel}, {"nodes", rep.nodes}});
    }
    add("represent_direct", worst_rel, o.tol, worst_rel <= o.tol);

    const double k = k_formula(ctx, q);
    const double envelope = 2.0 + bounds::j_closed(R_eff);
    add("k_envelope", k - envelope, kEnvelopeTol, k <= envelope + kEnvelopeTol);

    json j = {{"R", o.R},
              {"R_effective", R_eff},
              {"source", source},
              {"n", n},
              {"norm", norm},
              {"inverse_norm", inv_norm},
              {"quadrature", {{"initial_nodes", q.nodes}, {"tol", q.tol}, {"max_nodes", q.max_nodes}}},
              {"checks", checks},
              {"battery", battery},
              {"k_formula", k},
              {"envelope", envelope},
              {"pass", all}};
    emit(dump(j), o.output, out);
    return all ? kOk : kNumerical;
}

struct EstimateOptions {
    double R = 0.0;
    std::string mode = "witness";
    int n = 4;
    int degree = 8;
    long budget = 20000;
    std::uint64_t seed = 1;
    int trials = 50;
    int samples = kDefaultBoundarySamples;
    std::string output;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
    require_radius(o.R);
    if (o.budget <= 0) throw io::ParseError("--budget must be positive");
    if (o.degree < 1) throw io::ParseError("--degree must be at least 1");
    if (o.n < 1) throw io::ParseError("--n must be at least 1");
    if (o.trials < 1) throw io::ParseError("--trials must be at least 1");
    if (o.samples < 64) throw io::ParseError("--samples must be at least 64");

    json j = {{"R", o.R},
              {"mode", o.mode},
              {"seed", o.seed},
              {"degree", o.degree},
              {"envelope", {{"lower_simple", bounds::lower_simple(o.R)}, {"thm1_upper", bounds::thm1_upper(o.R)}}}};

    if (o.mode == "witness" || o.mode == "random") {
        const Matrix a = o.mode == "witness" ? estimator::jordan_witness(o.R)
                                             : estimator::random_admissible(static_cast<std::size_t>(o.n), o.R, o.seed);
        estimator::SearchOptions so;
        so.search_samples = o.samples;
        const auto res = estimator::maximize_ratio(a, o.R, o.degree, o.budget, o.seed, so);
        j["n"] = a.size();
        j["budget"] = o.budget;
        j["ratio"] = res.best.ratio;
        j["f"] = io::rational_to_json(res.best.f);
        j["converged"] = res.converged;
        j["evaluations"] = res.evaluations;
        j["certified"] = res.best.certified;
        j["sampling_slack"] = res.best.sampling_slack;
        j["matrix"] = io::matrix_to_json(a);
    } else if (o.mode == "complete") {
        const Matrix a = estimator::random_admissible(static_cast<std::size_t>(o.n), o.R, o.seed);
        double best = -1.0;
        json best_f;
        for (int t = 0; t < o.trials; ++t) {
            std::mt19937_64 rng(estimator::trial_seed(o.seed, static_cast<std::uint64_t>(t)));
            std::vector<RationalFunction> entries;
            for (int e = 0; e < 4; ++e) entries.push_back(estimator::random_laurent(o.degree, o.R, rng));
            const MatrixRationalFunction F(2, entries);
            const double r = estimator::complete_ratio(a, o.R, F, estimator::kCertifySamples);
            if (r > best) {
                best = r;
                json ent = json::array();
                for (const auto& f : entries) ent.push_back(io::rational_to_json(f));
                best_f = {{"dim", 2}, {"entries", std::move(ent)}};
            }
        }
        j["n"] = a.size();
        j["trials"] = o.trials;
        j["ratio"] = best;
        j["f"] = best_f;
        j["converged"] = true;
        j["matrix"] = io::matrix_to_json(a);
    } else {
        throw io::ParseError("--mode must be witness, random or complete");
    }
    emit(dump(j), o.output, out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"kspec: spectral sets of two-disk intersections and annulus K-spectral bounds"};
    app.require_subcommand(1);

    std::string output;
    double tol = kDefaultTol;

    auto* classify_cmd = app.add_subcommand("classify", "Classify the intersection of two disks of the sphere");
    std::string d1, d2;
    classify_cmd->add_option("d1", d1, "First disk JSON file")->required();
    classify_cmd->add_option("d2", d2, "Second disk JSON file")->required();
    classify_cmd->add_option("--tol", tol, "Classification tolerance")->capture_default_str();
    classify_cmd->add_option("-o,--output", output, "Write the report here instead of stdout");

    auto* certify_cmd = app.add_subcommand("certify", "Von Neumann test: is the disk a spectral set for the matrix?");
    std::string disk_path, matrix_path;
    certify_cmd->add_option("--disk", disk_path, "Disk JSON file")->required();
    certify_cmd->add_option("--matrix", matrix_path, "Matrix JSON file")->required();
    certify_cmd->add_option("-o,--output", output, "Write the report here instead of stdout");

    auto* bounds_cmd = app.add_subcommand("bounds", "CSV table of the annulus K-spectral bounds");
    std::vector<double> R_list;
    std::string R_range;
    double tail_tol = 1e-14;
    bounds_cmd->add_option("--R", R_list, "Radii (repeatable)");
    bounds_cmd->add_option("--R-range", R_range, "Geometric grid a:b:n");
    bounds_cmd->add_option("--tail-tol", tail_tol, "Tail bound for the infinite product")->capture_default_str();
    bounds_cmd->add_option("-o,--output", output, "Write the CSV here instead of stdout");

    auto* verify_cmd = app.add_subcommand("verify", "Check the annulus functional calculus on one operator");
    VerifyOptions vo;
    auto* vm = verify_cmd->add_option("matrix", vo.matrix_path, "Matrix JSON file");
    auto* vr = verify_cmd->add_option("--random", vo.random, "Random admissible operator: n seed")->expected(2);
    vm->excludes(vr);
    verify_cmd->add_option("--R", vo.R, "Outer radius of the annulus 1/R <= |z| <= R")->required();
    verify_cmd->add_option("--tol", vo.tol, "Tolerance for representation vs direct calculus")->capture_default_str();
    verify_cmd->add_option("--quad-nodes", vo.quad_nodes, "Initial quadrature nodes (power of two)")
        ->capture_default_str();
    verify_cmd->add_option("--margin", vo.margin, "Admissibility margin")->capture_default_str();
    verify_cmd->add_option("-o,--output", vo.output, "Write the report here instead of stdout");

    auto* estimate_cmd = app.add_subcommand("estimate", "Empirical K estimation on witness or random operators");
    EstimateOptions eo;
    estimate_cmd->add_option("--R", eo.R, "Outer radius of the annulus")->required();
    estimate_cmd->add_option("--mode", eo.mode, "witness | random | complete")
        ->check(CLI::IsMember({"witness", "random", "complete"}))
        ->capture_default_str();
    estimate_cmd->add_option("--n", eo.n, "Dimension for random and complete modes")->capture_default_str();
    estimate_cmd->add_option("--degree", eo.degree, "Laurent degree")->capture_default_str();
    estimate_cmd->add_option("--budget", eo.budget, "Candidate evaluations for the search")->capture_default_str();
    estimate_cmd->add_option("--seed", eo.seed, "Seed")->capture_default_str();
    estimate_cmd->add_option("--trials", eo.trials, "Random matrix functions in complete mode")
        ->capture_default_str();
    estimate_cmd->add_option("--samples", eo.samples, "Boundary samples per circle during search")
        ->capture_default_str();
    estimate_cmd->add_option("-o,--output", eo.output, "Write the report here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (classify_cmd->parsed()) return cmd_classify(d1, d2, tol, output, out);
        if (certify_cmd->parsed()) return cmd_certify(disk_path, matrix_path, output, out);
        if (bounds_cmd->parsed()) return cmd_bounds(R_list, R_range, tail_tol, output, out);
        if (verify_cmd->parsed()) {
            if (vo.matrix_path.empty() && vo.random.empty()) throw io::ParseError("give a matrix file or --random n seed");
            return cmd_verify(vo, out);
        }
        if (estimate_cmd->parsed()) return cmd_estimate(eo, out);
    } catch (const AmbiguousClassification& e) {
        err << "ambiguous classification: " << e.what() << "\n";
        return kAmbiguous;
    } catch (const AdmissibilityError& e) {
        err << "inadmissible operator: " << e.what() << " (norm " << e.norm() << ", inverse norm " << e.inverse_norm()
            << ", R " << e.radius() << ")\n";
        return kInadmissible;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}

}  // namespace kspec::cli
