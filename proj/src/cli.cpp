#include "fceq/cli.hpp"

#include "fceq/linalg.hpp"
#include "fceq/sampling.hpp"
#include "fceq/version.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fceq {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::CONFIG_INVALID, path + ": " + what);
}

Vec vec_from_json(const json& doc, const std::string& path) {
    if (!doc.is_array()) config_error(path, "expected an array of numbers");
    Vec out(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        if (!doc[i].is_number()) config_error(path, "expected an array of numbers");
        out(static_cast<Eigen::Index>(i)) = doc[i].get<double>();
    }
    return out;
}

Mat mat_from_json(const json& doc, const std::string& path) {
    if (!doc.is_array() || doc.empty()) config_error(path, "expected an array of rows");
    const std::size_t rows = doc.size();
    const std::size_t cols = doc[0].is_array() ? doc[0].size() : 0;
    if (cols == 0) config_error(path, "expected an array of rows");
    Mat out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!doc[r].is_array() || doc[r].size() != cols)
            config_error(path, "rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!doc[r][c].is_number()) config_error(path, "matrix entries must be numbers");
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                doc[r][c].get<double>();
        }
    }
    return out;
}

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json mat_to_json(const Mat& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json pivot_to_json(const PivotChoice& pivot) {
    return json{{"i", pivot.i + 1}, {"j", pivot.j + 1}, {"magnitude", pivot.magnitude}};
}

json intrinsic_to_json(const IntrinsicReport& report) {
    json out;
    out["worst_residual"] = report.worst_residual;
    out["n_checked"] = report.n_checked;
    if (report.worst_triple[0] >= 0)
        out["worst_triple"] = {report.worst_triple[0] + 1, report.worst_triple[1] + 1,
                               report.worst_triple[2] + 1};
    else
        out["worst_triple"] = nullptr;
    out["pivot"] = report.pivot ? pivot_to_json(*report.pivot) : json(nullptr);
    return out;
}

json outcome_to_json(const SolveOutcome& outcome) {
    json out;
    out["status"] = to_string(outcome.status);
    out["rho"] = outcome.rho ? vec_to_json(*outcome.rho) : json(nullptr);
    out["max_ceq_residual"] = outcome.max_ceq_residual;
    out["intrinsic"] = intrinsic_to_json(outcome.intrinsic);
    if (outcome.intrinsic_worst_v)
        out["intrinsic"]["worst_v"] = vec_to_json(*outcome.intrinsic_worst_v);
    out["nullspace_dim"] = outcome.nullspace_dim;
    out["samples_used"] = outcome.samples_used;
    out["epsilon_used"] = outcome.epsilon_used ? json(*outcome.epsilon_used) : json(nullptr);
    out["base_v"] = outcome.base_v ? vec_to_json(*outcome.base_v) : json(nullptr);
    out["pivot"] = outcome.pivot ? pivot_to_json(*outcome.pivot) : json(nullptr);
    return out;
}

TolerancePolicy tol_from_json(const json& doc, const std::string& path) {
    TolerancePolicy tol;
    for (auto& [key, value] : doc.items()) {
        if (key == "rank_rel")
            tol.rank_rel_tol = value.get<double>();
        else if (key == "residual")
            tol.residual_tol = value.get<double>();
        else if (key == "contact")
            tol.contact_tol = value.get<double>();
        else
            config_error(path + "." + key, "unknown tolerance field");
    }
    if (!(tol.rank_rel_tol > 0 && tol.residual_tol > 0 && tol.contact_tol > 0))
        config_error(path, "tolerances must be strictly positive");
    return tol;
}

json tol_to_json(const TolerancePolicy& tol) {
    return json{{"rank_rel", tol.rank_rel_tol},
                {"residual", tol.residual_tol},
                {"contact", tol.contact_tol}};
}

SolverConfig solver_from_json(const json& doc, const std::string& path) {
    SolverConfig cfg;
    for (auto& [key, value] : doc.items()) {
        if (key == "samples")
            cfg.n_sphere_samples = value.get<int>();
        else if (key == "seed")
            cfg.seed = value.get<std::uint64_t>();
        else if (key == "eps_fraction")
            cfg.eps_fraction = value.get<double>();
        else if (key == "max_eps_retries")
            cfg.max_eps_retries = value.get<int>();
        else if (key == "threads")
            cfg.threads = value.get<int>();
        else if (key == "tol")
            cfg.tol = tol_from_json(value, path + ".tol");
        else
            config_error(path + "." + key, "unknown solver field");
    }
    return cfg;
}

json solver_to_json(const SolverConfig& cfg) {
    return json{{"samples", cfg.n_sphere_samples},       {"seed", cfg.seed},
                {"eps_fraction", cfg.eps_fraction},      {"max_eps_retries", cfg.max_eps_retries},
                {"threads", cfg.threads},                {"tol", tol_to_json(cfg.tol)}};
}

QuadratureSpec quad_from_json(const json& doc, const std::string& path) {
    QuadratureSpec quad;
    for (auto& [key, value] : doc.items()) {
        if (key == "scheme") {
            const std::string name = value.get<std::string>();
            if (name == "angular")
                quad.scheme = QuadratureSpec::Scheme::angular;
            else if (name == "product_sphere")
                quad.scheme = QuadratureSpec::Scheme::product_sphere;
            else if (name == "monte_carlo")
                quad.scheme = QuadratureSpec::Scheme::monte_carlo;
            else
                config_error(path + ".scheme", "unknown scheme '" + name + "'");
        } else if (key == "nodes") {
            quad.n_nodes = value.get<int>();
        } else if (key == "seed") {
            quad.seed = value.get<std::uint64_t>();
        } else if (key == "threads") {
            quad.threads = value.get<int>();
        } else {
            config_error(path + "." + key, "unknown quadrature field");
        }
    }
    if (quad.n_nodes < 8) config_error(path + ".nodes", "needs at least 8 nodes");
    return quad;
}

json quad_to_json(const QuadratureSpec& quad) {
    const char* scheme = quad.scheme == QuadratureSpec::Scheme::angular ? "angular"
                         : quad.scheme == QuadratureSpec::Scheme::product_sphere
                             ? "product_sphere"
                             : "monte_carlo";
    return json{
        {"scheme", scheme}, {"nodes", quad.n_nodes}, {"seed", quad.seed},
        {"threads", quad.threads}};
}

}  // namespace

const char* to_string(JobConfig::Command command) noexcept {
    switch (command) {
        case JobConfig::Command::solve: return "solve";
        case JobConfig::Command::analyze: return "analyze";
        case JobConfig::Command::check: return "check";
        case JobConfig::Command::synth: return "synth";
    }
    return "unknown";
}

json metric_spec_to_json(const MetricSpec& spec) {
    json out;
    out["dim"] = spec.dim;
    switch (spec.kind) {
        case MetricSpec::Kind::riemannian: {
            out["kind"] = "riemannian";
            out["a"] = mat_to_json(spec.a);
            if (!spec.position_terms.empty()) {
                json terms = json::array();
                for (const auto& term : spec.position_terms)
                    terms.push_back(json{{"delta", mat_to_json(term.delta)},
                                         {"exponents", term.exponents}});
                out["position_terms"] = std::move(terms);
            }
            break;
        }
        case MetricSpec::Kind::randers:
            out["kind"] = "randers";
            out["a"] = mat_to_json(spec.a);
            out["b"] = vec_to_json(spec.b);
            break;
        case MetricSpec::Kind::synthetic_germ:
            out["kind"] = "synthetic_germ";
            out["base_norm"] = metric_spec_to_json(*spec.base_norm);
            out["rho_star"] = vec_to_json(spec.rho_star);
            out["base_point"] = vec_to_json(spec.base_point);
            if (spec.incompatibility != 0.0) out["incompatibility"] = spec.incompatibility;
            break;
    }
    return out;
}

MetricSpec metric_spec_from_json(const json& doc) {
    if (!doc.is_object()) config_error("metric", "expected an object");
    if (!doc.contains("kind")) config_error("metric.kind", "missing");
    const std::string kind = doc["kind"].get<std::string>();
    MetricSpec spec;
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        config_error("metric.dim", "missing integer dimension");
    spec.dim = doc["dim"].get<int>();
    if (spec.dim < 2) config_error("metric.dim", "must be at least 2");

    if (kind == "riemannian") {
        spec.kind = MetricSpec::Kind::riemannian;
        spec.a = doc.contains("a") ? mat_from_json(doc["a"], "metric.a")
                                   : Mat::Identity(spec.dim, spec.dim);
        if (doc.contains("position_terms")) {
            for (std::size_t t = 0; t < doc["position_terms"].size(); ++t) {
                const auto& term = doc["position_terms"][t];
                const std::string path = "metric.position_terms[" + std::to_string(t) + "]";
                PolyTerm poly;
                if (!term.contains("delta") || !term.contains("exponents"))
                    config_error(path, "needs delta and exponents");
                poly.delta = mat_from_json(term["delta"], path + ".delta");
                poly.exponents = term["exponents"].get<std::vector<int>>();
                spec.position_terms.push_back(std::move(poly));
            }
        }
    } else if (kind == "randers") {
        spec.kind = MetricSpec::Kind::randers;
        spec.a = doc.contains("a") ? mat_from_json(doc["a"], "metric.a")
                                   : Mat::Identity(spec.dim, spec.dim);
        if (!doc.contains("b")) config_error("metric.b", "randers needs the 1-form b");
        spec.b = vec_from_json(doc["b"], "metric.b");
    } else if (kind == "synthetic_germ") {
        spec.kind = MetricSpec::Kind::synthetic_germ;
        if (!doc.contains("base_norm")) config_error("metric.base_norm", "missing");
        spec.base_norm = std::make_shared<MetricSpec>(metric_spec_from_json(doc["base_norm"]));
        if (!doc.contains("rho_star")) config_error("metric.rho_star", "missing");
        spec.rho_star = vec_from_json(doc["rho_star"], "metric.rho_star");
        if (!doc.contains("base_point")) config_error("metric.base_point", "missing");
        spec.base_point = vec_from_json(doc["base_point"], "metric.base_point");
        if (doc.contains("incompatibility"))
            spec.incompatibility = doc["incompatibility"].get<double>();
    } else {
        config_error("metric.kind", "unknown kind '" + kind + "'");
    }
    return spec;
}

JobConfig parse_job_config(const json& doc, JobConfig::Command command) {
    if (!doc.is_object()) config_error("config", "expected a JSON object");
    JobConfig cfg;
    cfg.command = command;
    if (doc.contains("command")) {
        const std::string name = doc["command"].get<std::string>();
        if (name != to_string(command))
            config_error("command", "config says '" + name + "' but the subcommand is '" +
                                        std::string(to_string(command)) + "'");
    }
    if (!doc.contains("metric")) config_error("metric", "missing");
    cfg.metric = metric_spec_from_json(doc["metric"]);

    if (doc.contains("point")) {
        cfg.point = vec_from_json(doc["point"], "point");
    } else if (cfg.metric.kind == MetricSpec::Kind::synthetic_germ) {
        cfg.point = cfg.metric.base_point;  // germs default to their own base point
    } else {
        cfg.point = Vec::Zero(cfg.metric.dim);
    }
    if (cfg.point.size() != cfg.metric.dim)
        config_error("point", "dimension mismatch with metric.dim");

    if (doc.contains("solver")) cfg.solver = solver_from_json(doc["solver"], "solver");
    if (cfg.solver.n_sphere_samples < 2 * cfg.metric.dim)
        config_error("solver.samples", "needs at least 2*dim samples");
    if (!(cfg.solver.eps_fraction > 0.0 && cfg.solver.eps_fraction < 1.0))
        config_error("solver.eps_fraction", "must lie in (0, 1)");

    if (doc.contains("quadrature"))
        cfg.quad = quad_from_json(doc["quadrature"], "quadrature");
    if (doc.contains("output")) cfg.output_path = doc["output"].get<std::string>();

    if (command == JobConfig::Command::synth &&
        cfg.metric.kind != MetricSpec::Kind::synthetic_germ)
        config_error("metric.kind", "synth requires a synthetic_germ metric");
    return cfg;
}

JobConfig parse_job_config(const std::string& text, JobConfig::Command command) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error("config", std::string("not valid JSON: ") + e.what());
    }
    return parse_job_config(doc, command);
}

json Report::deterministic_body() const {
    json copy = body;
    copy.erase("wall_time_s");
    return copy;
}

namespace {

json echo_config(const JobConfig& cfg) {
    json out;
    out["command"] = to_string(cfg.command);
    out["metric"] = metric_spec_to_json(cfg.metric);
    out["point"] = vec_to_json(cfg.point);
    out["solver"] = solver_to_json(cfg.solver);
    if (cfg.quad) out["quadrature"] = quad_to_json(*cfg.quad);
    if (cfg.output_path) out["output"] = *cfg.output_path;
    return out;
}

int exit_code_for(JobConfig::Command command, const SolveOutcome& outcome) {
    if (command != JobConfig::Command::solve) return kExitOk;
    switch (outcome.status) {
        case SolveStatus::UNIQUE:
        case SolveStatus::RIEMANNIAN_INDETERMINATE: return kExitOk;
        case SolveStatus::INSOLVABLE: return kExitInsolvable;
        case SolveStatus::DEGENERATE_SAMPLING: return kExitDegenerateSampling;
    }
    return kExitError;
}

json run_analyze(const FinslerMetric& metric, const JobConfig& cfg) {
    const auto dirs =
        sample_directions(metric.dim(), cfg.solver.n_sphere_samples, cfg.solver.seed);
    int n_vertical = 0, n_horizontal = 0, n_both = 0, n_neither = 0;
    for (const auto& v : dirs) {
        const ContactClass c = classify(jet_at(metric, cfg.point, v), cfg.solver.tol);
        n_vertical += c.vertical;
        n_horizontal += c.horizontal;
        n_both += c.vertical && c.horizontal;
        n_neither += !c.vertical && !c.horizontal;
    }
    json out;
    out["census"] = json{{"n_samples", static_cast<int>(dirs.size())},
                         {"vertical", n_vertical},
                         {"horizontal", n_horizontal},
                         {"both", n_both},
                         {"neither", n_neither}};
    if (cfg.quad) {
        const AveragedMetric avg = averaged_metric_at(metric, cfg.point, *cfg.quad);
        out["averaged"] = json{{"gamma", mat_to_json(avg.gamma)},
                               {"normal_deviation", normal_deviation(avg)},
                               {"error_estimate", avg.error_estimate}};
    }
    return out;
}

json run_check(const FinslerMetric& metric, const JobConfig& cfg) {
    const auto dirs =
        sample_directions(metric.dim(), cfg.solver.n_sphere_samples, cfg.solver.seed);
    IntrinsicReport worst;
    Vec worst_v;
    int n_checked_total = 0, n_vertical = 0;
    bool first = true;
    for (const auto& v : dirs) {
        const PointJet jet = jet_at(metric, cfg.point, v);
        const FMatrix fm = f_matrix(jet);
        if (!pick_pivot(fm, cfg.solver.tol)) {
            ++n_vertical;
            continue;
        }
        const IntrinsicReport report = intrinsic_check(jet, cfg.solver.tol);
        n_checked_total += report.n_checked;
        if (first || report.worst_residual > worst.worst_residual) {
            worst = report;
            worst_v = v;
            first = false;
        }
    }
    json out = intrinsic_to_json(worst);
    out["n_checked"] = n_checked_total;
    out["worst_v"] = first ? json(nullptr) : vec_to_json(worst_v);
    out["n_samples"] = static_cast<int>(dirs.size());
    out["n_vertical_skipped"] = n_vertical;
    return out;
}

}  // namespace

Report run(const JobConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Report report;
    report.body["tool"] = json{{"name", "finsler-ceq"}, {"version", FCEQ_VERSION}};
    report.body["command"] = to_string(cfg.command);
    report.body["config"] = echo_config(cfg);

    const auto metric = build(cfg.metric);
    switch (cfg.command) {
        case JobConfig::Command::solve: {
            const SolveOutcome outcome = solve_at_point(*metric, cfg.point, cfg.solver);
            report.body["result"] = outcome_to_json(outcome);
            report.exit_code = exit_code_for(cfg.command, outcome);
            break;
        }
        case JobConfig::Command::analyze:
            report.body["result"] = run_analyze(*metric, cfg);
            break;
        case JobConfig::Command::check:
            report.body["result"] = run_check(*metric, cfg);
            break;
        case JobConfig::Command::synth: {
            const SolveOutcome outcome = solve_at_point(*metric, cfg.metric.base_point,
                                                        cfg.solver);
            json result;
            result["germ"] = metric_spec_to_json(cfg.metric);
            result["solve"] = outcome_to_json(outcome);
            double recovery = std::numeric_limits<double>::quiet_NaN();
            if (outcome.rho)
                recovery = (*outcome.rho - cfg.metric.rho_star).cwiseAbs().maxCoeff();
            result["recovery_error"] =
                std::isnan(recovery) ? json(nullptr) : json(recovery);
            result["self_test"] = (outcome.status == SolveStatus::UNIQUE && recovery <= 1e-7)
                                      ? "pass"
                                      : "fail";
            report.body["result"] = std::move(result);
            break;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.body["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
    return report;
}

}  // namespace fceq
