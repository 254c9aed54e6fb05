// Copyright 2026 The dispenc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dispenc: decompose | encode | verify | solve | predict | estimate
// Exit codes: 0 pass, 1 bad input, 2 verification failure, 3 infeasible parameters.

#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dispenc/predict.hpp"
#include "json_io.hpp"

using namespace dispenc;
using io::json;

namespace {

struct Common {
    std::string in;
    std::string out;
    std::string model = "blackbox";
    double delta = 0.05;
    double eps_prep = 1e-3;
    double eps = 0.0;
    std::uint64_t seed = 7;
    bool exact_prep = false;
    bool resources_only = false;
};

void add_common(CLI::App* app, Common& c, bool needs_input = true) {
    if (needs_input) app->add_option("--in,input", c.in, "input JSON file")->required();
    app->add_option("--out", c.out, "output file (stdout when omitted)");
    app->add_option("--model", c.model, "access model")->check(CLI::IsMember({"blackbox", "qram", "explicit"}));
    app->add_option("--delta", c.delta, "amplification target");
    app->add_option("--eps-prep", c.eps_prep, "preparation precision");
    app->add_option("--eps", c.eps, "target block-encoding error; checks delta and eps-prep against it");
    app->add_option("--seed", c.seed, "seed for sampled steps");
    app->add_flag("--exact-prep", c.exact_prep, "numerically exact amplitude loading");
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty())
        std::cout << text << "\n";
    else
        io::write_text(c.out, text + "\n");
}

AccessModel model_of(const Common& c) {
    AccessModel m;
    m.kind = model_from_name(c.model);
    m.delta = c.delta;
    m.eps_p = c.eps_prep;
    m.exact_prep = c.exact_prep;
    m.target_eps = c.eps;
    m.seed = c.seed;
    return m;
}

json params_of(const Common& c) {
    return {{"model", c.model}, {"delta", c.delta},      {"eps_prep", c.eps_prep},
            {"eps", c.eps},     {"seed", c.seed},        {"exact_prep", c.exact_prep}};
}

int cmd_decompose(const Common& c, const std::string& kind_opt) {
    const json j = io::read_file(c.in);
    LcuDecomposition dec;
    if (j.contains("matrix")) {
        const ComplexMatrix m = io::to_matrix(j.at("matrix"));
        if (!is_power_of_two(static_cast<std::size_t>(m.rows())))
            throw std::invalid_argument("decompose: n must be a power of two");
        std::string kind = kind_opt.empty() ? j.value("kind", std::string("sylvester")) : kind_opt;
        dec = lcu_decompose(m, kind == "stein" ? DisplacementKind::stein : DisplacementKind::sylvester);
    } else {
        const StructuredMatrix s = io::to_spec(j);
        if (!is_power_of_two(s.n)) throw std::invalid_argument("decompose: n must be a power of two");
        dec = lcu_decompose_structured(s);
    }
    json out = io::from_decomposition(dec);
    out["input"] = c.in;
    emit(c, out.dump(2));
    return 0;
}

json encode_report(const BlockEncoding& be, const ComplexMatrix& m, double alpha_factor, bool& pass) {
    BlockEncoding probe = be;
    probe.alpha *= alpha_factor;
    const VerifyReport v = verify_block_encoding(probe, m);
    pass = v.pass;
    json r = {{"family", family_name(be.family)},
              {"model", model_name(be.model.kind)},
              {"n", static_cast<std::size_t>(m.rows())},
              {"alpha", probe.alpha},
              {"ancillas", be.ancillas},
              {"expected_ancillas", v.expected_ancillas},
              {"epsilon_claimed", be.epsilon_bound},
              {"deviation", v.deviation},
              {"queries", be.tally.queries},
              {"gates", be.tally.gates},
              {"memory_entries", be.memory_entries},
              {"norm_m", v.norm_m},
              {"alpha_ok", v.alpha_ok},
              {"ancilla_ok", v.ancilla_ok},
              {"deviation_ok", v.deviation_ok},
              {"status", v.pass ? "PASS" : "FAIL"},
              {"delta", be.model.delta},
              {"eps_prep", be.model.eps_p}};
    if (be.prep) r["prep"] = io::from_prep(*be.prep);
    return r;
}

int cmd_encode(const Common& c, double alpha_factor, bool is_verify) {
    const StructuredMatrix s = io::to_spec(io::read_file(c.in));
    if (c.resources_only) {
        const auto dec = lcu_decompose_structured(s);
        EstimateInputs in;
        in.chi = 2.0 * chi_scaling(dec);
        in.prefactor = dec.prefactor;
        double mx = 0.0;
        for (const auto& t : dec.terms) mx = std::max(mx, std::abs(t.coeff));
        in.max_coeff = mx;
        if (is_like(s.family)) in.d = position_oracle_from_edits(s).d;
        const double eps = c.eps > 0.0 ? c.eps : in.chi * (c.delta * c.delta + c.eps_prep);
        const auto r = resource_estimate(s.family, model_from_name(c.model), s.n, c.delta, eps, in);
        json out = {{"family", family_name(s.family)}, {"model", c.model},          {"n", s.n},
                    {"queries", r.queries},           {"gates", r.gates},           {"ancillas", r.ancillas},
                    {"memory_entries", r.memory_entries}, {"L", r.L},               {"p0", r.p0},
                    {"params", params_of(c)}};
        emit(c, out.dump(2));
        return 0;
    }
    const BlockEncoding be = encode(s, model_of(c));
    bool pass = false;
    json out = encode_report(be, build_structured(s), alpha_factor, pass);
    out["params"] = params_of(c);
    emit(c, out.dump(2));
    if (is_verify && !pass) return 2;
    return 0;
}

int cmd_solve(const Common& c) {
    const json j = io::read_file(c.in);
    const StructuredMatrix s = io::to_spec(j.contains("spec") ? j.at("spec") : j);
    const ComplexVector b = io::to_evec(j.at("b"));
    const double eps = c.eps > 0.0 ? c.eps : 1e-3;
    AccessModel m = model_of(c);
    m.target_eps = 0.0;
    const StructuredSolve sol = solve_structured(s, b, m, eps);
    json out = {{"solution", io::from_cvec(sol.report.solution)},
                {"kappa", sol.report.kappa},
                {"success_prob", sol.report.success_prob},
                {"fidelity", sol.report.fidelity},
                {"delta", sol.report.delta},
                {"eps", eps},
                {"alpha", sol.alpha},
                {"ancillas", sol.ancillas},
                {"complemented", sol.complemented},
                {"deviation", sol.verify.deviation},
                {"tally", io::from_tally(sol.report.tally)},
                {"status", sol.verify.pass ? "PASS" : "FAIL"},
                {"params", params_of(c)}};
    emit(c, out.dump(2));
    return sol.verify.pass ? 0 : 2;
}

int cmd_predict(const Common& c) {
    const json j = io::read_file(c.in);
    PredictionTask t;
    t.n = j.at("n").get<std::size_t>();
    if (j.contains("ar1")) {
        t.ar_a = j.at("ar1").at("a").get<double>();
        t.ar_sigma2 = j.at("ar1").value("sigma2", 1.0);
    } else {
        t.r = io::to_cvec(j.at("r"));
    }
    if (j.contains("past")) t.past = io::to_cvec(j.at("past"));
    t.shots = j.value("shots", std::size_t{100000});
    t.rho = j.value("rho", 0.0);
    PredictConfig cfg;
    cfg.seed = c.seed;
    cfg.eps = c.eps > 0.0 ? c.eps : 1e-3;
    cfg.exact_prep = c.exact_prep;
    cfg.model = model_from_name(c.model);
    const PredictionReport r = predict(t, cfg);
    json out = {{"r", io::from_cvec(r.r)},
                {"w_classical", io::from_cvec(r.w_classical)},
                {"w_quantum", io::from_cvec(r.w_quantum)},
                {"route_fidelity", r.route_fidelity},
                {"u_hat_exact", io::from_cplx(r.u_hat_exact)},
                {"u_hat_estimate", io::from_cplx(r.u_hat_estimate)},
                {"inner_exact", io::from_cplx(r.inner_exact)},
                {"inner_estimate", io::from_cplx(r.inner_estimate)},
                {"shots", t.shots},
                {"kappa", r.kappa},
                {"spectrum", {{"f_min", r.spectrum.f_min}, {"f_max", r.spectrum.f_max},
                              {"kappa_bound", r.spectrum.unbounded ? json(nullptr) : json(r.spectrum.kappa_bound)}}},
                {"wiener", {{"in_class", r.wiener.in_class}, {"abs_sum", r.wiener.abs_sum}, {"chi", r.wiener.chi},
                            {"chi_bound_ok", r.wiener.chi_bound_ok}}},
                {"autocov_selftest_error", r.autocov_selftest_error},
                {"block_deviation", r.block_deviation},
                {"epsilon_bound", r.epsilon_bound},
                {"delta", r.delta},
                {"eps_prep", r.eps_p},
                {"warnings", r.warnings},
                {"note", "past samples are taken as explicit inputs; no data access model is assumed for them"},
                {"params", params_of(c)}};
    out["params"]["eps"] = cfg.eps;
    emit(c, out.dump(2));
    return 0;
}

int cmd_estimate(const Common& c, const std::string& family, std::size_t n_min, std::size_t n_max,
                 const EstimateInputs& in) {
    const Family f = family_from_name(family);
    const ModelKind m = model_from_name(c.model);
    if (!is_power_of_two(n_min) || !is_power_of_two(n_max) || n_min > n_max || n_min < 2)
        throw std::invalid_argument("estimate: n range must be powers of two with n-min <= n-max");
    const double eps = c.eps > 0.0 ? c.eps : 1e-2;
    std::ostringstream csv;
    csv << "n,queries,gates,ancillas,memory_entries,dense_memory_entries,L\n";
    std::vector<std::size_t> ns;
    std::vector<double> q, g, mem;
    for (std::size_t n = n_min; n <= n_max; n *= 2) {
        const auto r = resource_estimate(f, m, n, c.delta, eps, in);
        csv << n << "," << r.queries << "," << r.gates << "," << r.ancillas << "," << r.memory_entries << ","
            << r.dense_memory_entries << "," << r.L << "\n";
        ns.push_back(n);
        q.push_back(double(r.queries));
        g.push_back(double(r.gates));
        mem.push_back(double(r.memory_entries));
    }
    const GrowthFit fq = fit_growth(ns, q), fg = fit_growth(ns, g), fm = fit_growth(ns, mem);
    json summary = {{"family", family},
                    {"model", c.model},
                    {"n_min", n_min},
                    {"n_max", n_max},
                    {"queries_exponent", fq.power},
                    {"gates_exponent", fg.power},
                    {"gates_tail_exponent", fg.tail_power},
                    {"gates_polylog_degree", fg.polylog},
                    {"memory_exponent", fm.power},
                    {"params", params_of(c)}};
    if (c.out.empty()) {
        std::cout << csv.str();
    } else {
        io::write_text(c.out, csv.str());
    }
    std::cerr << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-encodings of displacement-structured matrices"};
    app.require_subcommand(1);

    Common dc, ec, vc, sc, pc, xc;
    std::string kind;
    auto* dec = app.add_subcommand("decompose", "LCU decomposition of a matrix or structured spec");
    add_common(dec, dc);
    dec->add_option("--kind", kind, "displacement kind for dense input")->check(CLI::IsMember({"stein", "sylvester"}));

    auto* enc = app.add_subcommand("encode", "build a block-encoding and report it");
    add_common(enc, ec);
    enc->add_flag("--resources-only", ec.resources_only, "closed-form counts only");

    double corrupt = 1.0;
    auto* ver = app.add_subcommand("verify", "build and verify a block-encoding");
    add_common(ver, vc);
    ver->add_option("--corrupt-alpha", corrupt, "scale alpha before verifying (negative control)");

    auto* sol = app.add_subcommand("solve", "solve M x = b through the encoded block");
    add_common(sol, sc);

    auto* pre = app.add_subcommand("predict", "Wiener-Hopf linear prediction");
    add_common(pre, pc);

    std::string family = "toeplitz";
    std::size_t n_min = 16, n_max = std::size_t{1} << 20;
    EstimateInputs in;
    auto* est = app.add_subcommand("estimate", "closed-form resource scaling table");
    add_common(est, xc, false);
    est->add_option("--family", family, "structured family");
    est->add_option("--n-min", n_min, "smallest n");
    est->add_option("--n-max", n_max, "largest n");
    est->add_option("--chi", in.chi, "chi held fixed across n");
    est->add_option("--max-coeff", in.max_coeff, "largest slot coefficient");
    est->add_option("--d", in.d, "row sparsity for -like families");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*dec) return cmd_decompose(dc, kind);
        if (*enc) return cmd_encode(ec, 1.0, false);
        if (*ver) return cmd_encode(vc, corrupt, true);
        if (*sol) return cmd_solve(sc);
        if (*pre) return cmd_predict(pc);
        if (*est) return cmd_estimate(xc, family, n_min, n_max, in);
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
