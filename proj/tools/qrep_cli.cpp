#include "qrep/analytic.hpp"
#include "qrep/config.hpp"
#include "qrep/memories.hpp"
#include "qrep/repeater.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

namespace {

using namespace qrep;

constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

std::string num(double v) { return format_number(v); }

// simulate and compare analyze the final pair as the end stations would:
// each arm is retrieved through its memory and detected with hardware of the
// same grade as the connection detectors (loss p_con, dark counts n_dc_con).
// The rate commands analyze ideally, matching the closed-form rate model.
BellOptions station_analysis(const RepeaterParams& params) {
    BellOptions opt;
    opt.memory = params.memory;
    opt.loss = params.p_con;
    opt.n_dc = params.n_dc_con;
    return opt;
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

std::string config_header(const RunConfig& cfg, const std::string& command) {
    std::string out = "# qrep " + command + "\n";
    for (const auto& [k, v] : cfg.echo())
        out += "# " + k + " = " + v + "\n";
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw ConfigError("write to '" + path + "' failed");
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty())
        std::cout << text;
    else
        write_text(cfg.output, text);
}

std::string occupation_label(const FockDensityMatrix& rho, long index) {
    std::vector<int> occ = rho.occupations_of(index);
    std::string s;
    for (size_t m = 0; m < occ.size(); ++m) {
        if (m) s += '-';
        s += std::to_string(occ[m]);
    }
    return s;
}

void dump_state_csv(const std::string& path, const FockDensityMatrix& rho) {
    std::ostringstream os;
    os << "# qrep state dump\n";
    os << "# modes = " << rho.mode_count() << "\n";
    os << "# cutoff = " << rho.cutoff() << "\n";
    os << "# trace = " << num(rho.trace()) << "\n";
    os << "ket,bra,re,im\n";
    for (long i = 0; i < rho.dim(); ++i)
        for (long j = 0; j < rho.dim(); ++j) {
            Complex v = rho.elements()(i, j);
            os << occupation_label(rho, i) << ',' << occupation_label(rho, j)
               << ',' << num(v.real()) << ',' << num(v.imag()) << '\n';
        }
    write_text(path, os.str());
}

// ---------------------------------------------------------------------------
// simulate: grow the chain level by level, analyzing the state at each one.

int cmd_simulate(const RunConfig& cfg) {
    RepeaterParams params = cfg.to_params();
    params.validate();

    std::optional<TransferTensor> tensor;
    if (params.n > 0) tensor.emplace(connection_tensor(params, cfg.cutoff));

    std::string body =
        "level,L_over_L0,S,q_ps,q_step,rate_exact,rate_simplified\n";
    ConditionalState cur = generate(params, cfg.cutoff);
    std::vector<double> q_list{cur.q};
    for (int k = 0;; ++k) {
        BellResult b = bell(cur.rho, params, station_analysis(params));
        RateResult rr = rate(params.tau, q_list, b.q_ps);
        body += join_row({std::to_string(k), num(std::ldexp(1.0, k)), num(b.S),
                          num(b.q_ps), num(q_list.back()), num(rr.exact),
                          num(rr.simplified)});
        if (k == params.n) break;
        ConditionalState next = connect_with(*tensor, cur.rho, cur.rho);
        q_list.push_back(next.q);
        cur = std::move(next);
    }

    emit(cfg, config_header(cfg, "simulate") + body);
    if (!cfg.dump_state.empty()) dump_state_csv(cfg.dump_state, cur.rho);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep: one full chain per axis value, dispatched to a small worker pool,
// rows written in axis order regardless of completion order.

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.sweep_param.empty())
        throw ConfigError("sweep requires sweep_param");
    const std::vector<double>& values = cfg.sweep_values;
    if (values.empty())
        throw ConfigError("sweep requires sweep_values");
    {
        RunConfig probe = cfg;  // reject unknown axis names before spawning
        apply_parameter(probe, cfg.sweep_param, values.front());
    }

    std::vector<std::string> rows(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            try {
                RunConfig point = cfg;
                apply_parameter(point, cfg.sweep_param, values[i]);
                RepeaterParams params = point.to_params();
                params.validate();
                ChainResult chain = run_chain(params, point.cutoff);
                BellResult b = bell(chain.rho, params, station_analysis(params));
                RateResult rr = rate(params.tau, chain.q, b.q_ps);
                rows[i] = join_row({num(values[i]), num(b.S), num(b.q_ps),
                                    num(chain.q.back()), num(rr.exact),
                                    num(rr.simplified)});
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned pool = std::max(1u, std::min({std::thread::hardware_concurrency(),
                                           static_cast<unsigned>(values.size()),
                                           8u}));
    std::vector<std::thread> workers;
    for (unsigned w = 1; w < pool; ++w) workers.emplace_back(work);
    work();
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::string body =
        cfg.sweep_param + ",S,q_ps,q_final,rate_exact,rate_simplified\n";
    for (auto& row : rows) body += row;
    emit(cfg, config_header(cfg, "sweep") + body);
    return 0;
}

// ---------------------------------------------------------------------------
// analytic: evaluate one closed formula by name.

std::string normalize_formula(std::string id) {
    for (char& c : id) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == '-') c = '_';
    }
    static const std::vector<std::pair<const char*, const char*>> aliases = {
        {"family_recurrence", "eq16"},
        {"family_solution", "eq17"},
        {"family_deficit", "eq18"},
        {"family_exact", "d5"},
        {"memory_darkcount_noncounting", "eq19"},
        {"memory_darkcount_counting", "eq20"},
        {"squeezing_noncounting", "eq23"},
        {"squeezing_counting", "eq24"},
        {"generation_darkcount_noncounting", "eq25"},
        {"generation_darkcount_counting", "eq26"},
        {"max_distance_squeezing", "eq27"},
        {"max_distance_darkcount", "eq28"},
        {"two_pass_threshold", "eq30"},
        {"one_pass_threshold", "eq33"},
        {"rate_noncounting", "eq34"},
        {"eq35", "eq34"},
        {"rate_counting", "eq36"},
        {"eq37", "eq36"},
        {"eta", "e3"},
        {"connection_success", "e4"},
        {"eta_product", "e11"},
        {"cross_terms", "crossterms"},
        {"cross_term_dominance", "crossterms"},
    };
    for (const auto& [from, to] : aliases)
        if (id == from) return to;
    return id;
}

int cmd_analytic(const RunConfig& cfg) {
    const std::string id = normalize_formula(cfg.formula);
    PerturbativeInputs in;
    in.L_over_L0 = cfg.L;
    in.p_gen = cfg.p_gen;
    in.p_con = cfg.p_con;
    in.c1 = cfg.c1;
    in.c2_mag = std::hypot(cfg.c2_re, cfg.c2_im);
    in.c3 = cfg.c3;
    in.n_dc = cfg.ndc;
    in.r = cfg.r;
    in.detector = cfg.detector_kind();

    std::string body;
    bool valid = true;

    auto fg_rows = [&](bool closed) {
        if (cfg.n < 0) throw ConfigError("n must be nonnegative");
        body = "n,f,g\n";
        FGPair fg;  // level-0 start of the recurrence
        for (int k = 0; k <= cfg.n; ++k) {
            if (closed) fg = f_g_solution(k);
            body += join_row({std::to_string(k), num(fg.f), num(fg.g)});
            if (!closed) fg = f_g_recurrence(fg);
        }
    };
    auto perturbative_row = [&](const PerturbativeS& out,
                                std::vector<std::string> lead) {
        lead.push_back(num(out.S));
        lead.push_back(num(out.deficit));
        lead.push_back(out.valid ? "1" : "0");
        body += join_row(lead);
        valid = out.valid;
    };

    if (id == "eq16" || id == "eq17") {
        fg_rows(id == "eq17");
    } else if (id == "eq18") {
        double deficit = (cfg.L - 1.0) * (cfg.L - 1.0) * cfg.c1 * cfg.c1;
        body = "L_over_L0,c1,S,deficit,valid\n";
        PerturbativeS out{kTsirelson * (1.0 - deficit), deficit, deficit < 1.0};
        perturbative_row(out, {num(cfg.L), num(cfg.c1)});
    } else if (id == "d5") {
        if (cfg.n < 0) throw ConfigError("n must be nonnegative");
        FGPair fg = f_g_solution(cfg.n);
        double S = s_exact_c1(fg.f, fg.g, cfg.c1);
        body = "n,f,g,c1,S,deficit\n";
        body += join_row({std::to_string(cfg.n), num(fg.f), num(fg.g),
                          num(cfg.c1), num(S), num(1.0 - S / kTsirelson)});
    } else if (id == "eq19" || id == "eq20") {
        in.detector =
            id == "eq19" ? DetectorKind::NonCounting : DetectorKind::Counting;
        body = "L_over_L0,p_con,c1,c2,c3,ndc,S,deficit,valid\n";
        perturbative_row(s_memory_darkcount(in),
                         {num(in.L_over_L0), num(in.p_con), num(in.c1),
                          num(in.c2_mag), num(in.c3), num(in.n_dc)});
    } else if (id == "eq23" || id == "eq24") {
        in.detector =
            id == "eq23" ? DetectorKind::NonCounting : DetectorKind::Counting;
        body = "L_over_L0,p_gen,p_con,r,S,deficit,valid\n";
        perturbative_row(s_finite_squeezing(in),
                         {num(in.L_over_L0), num(in.p_gen), num(in.p_con),
                          num(in.r)});
    } else if (id == "eq25" || id == "eq26") {
        in.detector =
            id == "eq25" ? DetectorKind::NonCounting : DetectorKind::Counting;
        body = "L_over_L0,p_gen,ndc,S,deficit,valid\n";
        perturbative_row(s_generation_darkcount(in),
                         {num(in.L_over_L0), num(in.p_gen), num(in.n_dc)});
    } else if (id == "eq27") {
        in.detector = DetectorKind::NonCounting;
        body = "r,p_gen,p_con,L_max\n";
        body += join_row({num(in.r), num(in.p_gen), num(in.p_con),
                          num(max_distance(DistanceLimit::Squeezing, in))});
    } else if (id == "eq28") {
        in.detector = DetectorKind::NonCounting;
        body = "ndc,p_gen,L_max\n";
        body += join_row({num(in.n_dc), num(in.p_gen),
                          num(max_distance(DistanceLimit::GenDarkCount, in))});
    } else if (id == "eq30") {
        in.detector = DetectorKind::NonCounting;
        body = "L_over_L0,p_con,xi_max\n";
        body += join_row({num(in.L_over_L0), num(in.p_con),
                          num(max_distance(DistanceLimit::TwoPassXi, in))});
    } else if (id == "eq33") {
        in.detector = DetectorKind::NonCounting;
        double s_max = max_distance(DistanceLimit::OnePassS, in);
        body = "L_over_L0,p_con,s_max,s_max_db\n";
        body += join_row({num(in.L_over_L0), num(in.p_con), num(s_max),
                          num(10.0 * std::log10(s_max))});
    } else if (id == "eq34" || id == "eq36") {
        DetectorKind det =
            id == "eq34" ? DetectorKind::NonCounting : DetectorKind::Counting;
        double rt = rate_closed_form(cfg.r, cfg.p_gen, cfg.p_con, cfg.L, det);
        double log_rt =
            cfg.r > 0
                ? log_rate_closed_form(cfg.r, cfg.p_gen, cfg.p_con, cfg.L, det)
                : -std::numeric_limits<double>::infinity();
        body = "L_over_L0,r,p_gen,p_con,rate_tau,log_rate_tau,rate_per_second\n";
        body += join_row({num(cfg.L), num(cfg.r), num(cfg.p_gen),
                          num(cfg.p_con), num(rt), num(log_rt),
                          num(rt / cfg.tau)});
    } else if (id == "e3" || id == "e4") {
        if (cfg.n < 0) throw ConfigError("n must be nonnegative");
        body = "n,eta,q_next\n";
        for (int k = 0; k <= cfg.n; ++k) {
            double eta = eta_solution(k, cfg.p_con);
            body += join_row({std::to_string(k), num(eta),
                              num(connection_success(eta, cfg.p_con))});
        }
    } else if (id == "e11") {
        if (cfg.n < 0) throw ConfigError("n must be nonnegative");
        double exact = log_eta_product(cfg.n, cfg.p_con);
        double est = log_eta_product_estimate(cfg.n, cfg.p_con);
        body = "n,p_con,log_product,log_estimate,product_rel_error\n";
        body += join_row({std::to_string(cfg.n), num(cfg.p_con), num(exact),
                          num(est), num(std::abs(std::expm1(est - exact)))});
    } else if (id == "dilog") {
        body = "x,dilog\n";
        body += join_row({num(cfg.x), num(dilog(cfg.x))});
    } else if (id == "crossterms") {
        CrossTermReport ct = cross_term_dominance(cfg.ndc, cfg.r);
        body = "ndc,r,ratio,dominant\n";
        body += join_row({num(cfg.ndc), num(cfg.r), num(ct.ratio),
                          ct.dominant ? "1" : "0"});
    } else {
        throw ConfigError(
            "unknown formula '" + cfg.formula +
            "'; known: eq16 eq17 eq18 d5 eq19 eq20 eq23 eq24 eq25 eq26 eq27 "
            "eq28 eq30 eq33 eq34 eq35 eq36 eq37 e3 e4 e11 dilog cross_terms "
            "(descriptive aliases in --help)");
    }

    std::string head = config_header(cfg, "analytic");
    if (!valid)
        head += "# warning: outside the perturbative validity window\n";
    emit(cfg, head + body);
    if (!valid && cfg.strict) {
        std::cerr << "validity error: formula evaluated outside its "
                     "perturbative window\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare: simulated Bell parameter per level against the sum of the
// single-source leading-order deficits.

int cmd_compare(const RunConfig& cfg) {
    RepeaterParams params = cfg.to_params();
    params.validate();
    ReducedMemory mem = params.memory;

    std::string cross_label;
    double cross_ratio;
    if (cfg.r > 0) {
        CrossTermReport ct = cross_term_dominance(cfg.n_dc_gen, cfg.r);
        cross_ratio = ct.ratio;
        cross_label = ct.dominant ? "dominant" : "negligible";
    } else {
        cross_ratio = cfg.n_dc_gen > 0
                          ? std::numeric_limits<double>::infinity()
                          : 0.0;
        cross_label = cfg.n_dc_gen > 0 ? "dominant" : "negligible";
    }

    std::optional<TransferTensor> tensor;
    if (params.n > 0) tensor.emplace(connection_tensor(params, cfg.cutoff));

    std::string body =
        "level,L_over_L0,S_numeric,S_analytic,deficit_numeric,"
        "deficit_analytic,abs_error,rel_deficit_error,cross_term_ratio,"
        "cross_terms\n";
    bool all_valid = true;
    ConditionalState cur = generate(params, cfg.cutoff);
    for (int k = 0;; ++k) {
        BellResult b = bell(cur.rho, params, station_analysis(params));
        double d_num = 1.0 - b.S / kTsirelson;

        PerturbativeInputs base;
        base.L_over_L0 = std::ldexp(1.0, k);
        base.p_gen = cfg.p_gen;
        base.p_con = cfg.p_con;
        base.detector = params.detector;
        PerturbativeInputs mi = base;
        mi.c1 = mem.c1;
        mi.c2_mag = std::abs(mem.c2);
        mi.c3 = mem.c3;
        mi.n_dc = cfg.n_dc_con;
        PerturbativeInputs sq = base;
        sq.r = cfg.r;
        PerturbativeInputs gd = base;
        gd.n_dc = cfg.n_dc_gen;
        PerturbativeS m = s_memory_darkcount(mi);
        PerturbativeS f = s_finite_squeezing(sq);
        PerturbativeS g = s_generation_darkcount(gd);
        double d_ana = m.deficit + f.deficit + g.deficit;
        bool ok = m.valid && f.valid && g.valid && d_ana < 1.0;
        all_valid = all_valid && ok;

        double rel = d_ana != 0.0
                         ? std::abs(d_num - d_ana) / std::abs(d_ana)
                         : (std::abs(d_num) < 1e-12
                                ? 0.0
                                : std::numeric_limits<double>::infinity());
        body += join_row({std::to_string(k), num(base.L_over_L0), num(b.S),
                          num(kTsirelson * (1.0 - d_ana)), num(d_num),
                          num(d_ana), num(std::abs(b.S - kTsirelson * (1.0 - d_ana))),
                          num(rel), num(cross_ratio), cross_label});
        if (k == params.n) break;
        cur = connect_with(*tensor, cur.rho, cur.rho);
    }

    std::string head = config_header(cfg, "compare");
    if (!all_valid)
        head += "# warning: outside the perturbative validity window\n";
    emit(cfg, head + body);
    if (!cfg.dump_state.empty()) dump_state_csv(cfg.dump_state, cur.rho);
    if (!all_valid && cfg.strict) {
        std::cerr << "validity error: comparison left the perturbative "
                     "window\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// rate and rate-mc share the per-level chain walk.

double solve_fixed_s_squeezing(const RunConfig& cfg, double L) {
    double scale;
    if (cfg.detector_kind() == DetectorKind::Counting) {
        scale = 8.0 * L * L * cfg.p_gen * cfg.p_con;
        if (scale <= 0.0)
            throw ConfigError("fixed_s with counting detectors needs "
                              "p_gen > 0 and p_con > 0");
    } else {
        scale = 2.0 * L * L * (1.0 + cfg.p_gen) * (1.0 + cfg.p_con);
    }
    return std::sqrt(cfg.s_deficit / scale);
}

int cmd_rate(const RunConfig& cfg, bool mc_only) {
    RepeaterParams params = cfg.to_params();
    params.validate();
    if (cfg.s_deficit <= 0.0 || cfg.s_deficit >= 1.0) {
        if (cfg.fixed_s)
            throw ConfigError("s_deficit must be in (0, 1)");
    }

    const double slope_exponent =
        2.0 + (params.detector == DetectorKind::Counting
                   ? std::log2(3.0)
                   : std::log2(1.5));

    std::string body;
    if (mc_only)
        body = "level,L_over_L0,rate_exact,rate_mc,mc_mean_time,"
               "mc_time_std_error\n";
    else if (cfg.fixed_s)
        body = "level,L_over_L0,r,S,rate_exact,rate_simplified,"
               "rate_closed_form,rate_reference,rate_mc,mc_time_std_error\n";
    else
        body = "level,L_over_L0,rate_exact,rate_simplified,rate_closed_form,"
               "rate_mc,mc_mean_time,mc_time_std_error\n";

    double reference_scale = 0.0;
    std::optional<TransferTensor> tensor;
    std::optional<ConditionalState> cur;
    std::vector<double> q_list;

    for (int k = 0; k <= params.n; ++k) {
        double L = std::ldexp(1.0, k);
        RepeaterParams level_params = params;
        if (cfg.fixed_s) {
            // a fresh chain per length, with r chosen to pin the Bell deficit
            level_params.r = solve_fixed_s_squeezing(cfg, L);
            level_params.n = k;
            ChainResult chain = run_chain(level_params, cfg.cutoff);
            q_list = chain.q;
            cur.emplace(ConditionalState{chain.rho, chain.q.back()});
        } else if (!cur) {
            if (params.n > 0)
                tensor.emplace(connection_tensor(params, cfg.cutoff));
            cur.emplace(generate(params, cfg.cutoff));
            q_list = {cur->q};
        } else {
            ConditionalState next = connect_with(*tensor, cur->rho, cur->rho);
            q_list.push_back(next.q);
            cur.emplace(std::move(next));
        }

        BellResult b = bell(cur->rho, level_params);
        RateResult rr = rate(params.tau, q_list, b.q_ps);
        MonteCarloResult mc = rate_monte_carlo(params.tau, q_list, b.q_ps,
                                               cfg.trials, cfg.seed);
        if (mc_only) {
            body += join_row({std::to_string(k), num(L), num(rr.exact),
                              num(mc.rate), num(mc.mean_time),
                              num(mc.std_error)});
            continue;
        }
        double closed = rate_closed_form(level_params.r, params.p_gen,
                                         params.p_con, L, params.detector) /
                        params.tau;
        if (cfg.fixed_s) {
            if (k == 0) reference_scale = rr.exact;
            double reference =
                reference_scale * std::pow(L, -slope_exponent);
            body += join_row({std::to_string(k), num(L), num(level_params.r),
                              num(b.S), num(rr.exact), num(rr.simplified),
                              num(closed), num(reference), num(mc.rate),
                              num(mc.std_error)});
        } else {
            body += join_row({std::to_string(k), num(L), num(rr.exact),
                              num(rr.simplified), num(closed), num(mc.rate),
                              num(mc.mean_time), num(mc.std_error)});
        }
    }

    emit(cfg, config_header(cfg, mc_only ? "rate-mc" : "rate") + body);
    if (!cfg.dump_state.empty()) dump_state_csv(cfg.dump_state, cur->rho);
    return 0;
}

// ---------------------------------------------------------------------------

int dispatch(const std::string& command, const RunConfig& cfg) {
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "analytic") return cmd_analytic(cfg);
    if (command == "compare") return cmd_compare(cfg);
    if (command == "rate") return cmd_rate(cfg, false);
    if (command == "rate-mc") return cmd_rate(cfg, true);
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{
        "Entanglement distribution over a nested repeater chain with "
        "imperfect quantum memories: full density-matrix simulation, "
        "closed-form expressions, and distribution-rate estimates."};
    app.set_config("--config", "", "flat key=value config file (# comments); "
                                   "command-line flags take precedence");
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 ok, 2 configuration error, 3 numerical failure,\n"
        "4 validity failure (perturbative-window violations only with "
        "--strict).\n\n"
        "Formulas for 'analytic': eq16/eq17 (coefficient recurrence and\n"
        "closed form), eq18, d5 (exact family Bell parameter), eq19/eq20\n"
        "(memory and connection dark counts), eq23/eq24 (finite squeezing),\n"
        "eq25/eq26 (generation dark counts), eq27/eq28 (maximal distance),\n"
        "eq30/eq33 (cell thresholds), eq34-eq37 (loss-only rates), e3, e4,\n"
        "e11, dilog, cross_terms; descriptive aliases such as\n"
        "squeezing_counting or max_distance_darkcount also work.");

    app.add_option("--r", cfg.r, "pair-source squeezing parameter")
        ->capture_default_str();
    app.add_option("--p_gen,--pgen", cfg.p_gen,
                   "detector-arm loss during generation")
        ->capture_default_str();
    app.add_option("--p_con,--pcon", cfg.p_con,
                   "transmission loss during connection")
        ->capture_default_str();
    app.add_option("--n_dc_gen", cfg.n_dc_gen,
                   "mean dark counts per generation detector window")
        ->capture_default_str();
    app.add_option("--n_dc_con", cfg.n_dc_con,
                   "mean dark counts per connection detector window")
        ->capture_default_str();
    app.add_option("--tau", cfg.tau, "one-segment communication time, seconds")
        ->capture_default_str();
    app.add_option("--n,--levels", cfg.n, "nesting levels; length is 2^n")
        ->capture_default_str();
    app.add_option("--detector", cfg.detector, "counting | non_counting")
        ->capture_default_str();
    app.add_option("--dark_path", cfg.dark_path,
                   "reduced | explicit dark-count circuit route")
        ->capture_default_str();

    app.add_option("--memory_kind", cfg.memory_kind,
                   "ideal | generic | two_pass | one_pass")
        ->capture_default_str();
    app.add_option("--b1", cfg.b1,
                   "stored-mode retention; omit to complete from unitarity");
    app.add_option("--b2", cfg.b2, "auxiliary passive admixture")
        ->capture_default_str();
    app.add_option("--c1", cfg.c1, "stored-mode conjugate admixture")
        ->capture_default_str();
    app.add_option("--c2_re", cfg.c2_re, "Re of the auxiliary admixture")
        ->capture_default_str();
    app.add_option("--c2_im", cfg.c2_im, "Im of the auxiliary admixture")
        ->capture_default_str();
    app.add_option("--c3", cfg.c3, "auxiliary conjugate admixture")
        ->capture_default_str();
    app.add_option("--kappa", cfg.kappa,
                   "cell coupling; defaults to 2 (two_pass) or 1 (one_pass)");
    app.add_option("--xi", cfg.xi, "two-pass cell reflection coefficient")
        ->capture_default_str();
    app.add_option("--g", cfg.g, "one-pass feedback gain")
        ->capture_default_str();
    app.add_option("--s", cfg.s, "one-pass initial variance squeezing factor")
        ->capture_default_str();

    app.add_option("--cutoff", cfg.cutoff, "Fock-space photon cutoff per mode")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed for sampled estimates")
        ->capture_default_str();
    app.add_flag("--strict", cfg.strict,
                 "exit 4 when a perturbative validity flag trips");
    app.add_option("--output", cfg.output, "CSV destination; default stdout");
    app.add_option("--dump_state,--dump-state", cfg.dump_state,
                   "also write the final two-mode state to this CSV path");

    app.add_option("--sweep_param", cfg.sweep_param,
                   "parameter name swept by the sweep command");
    app.add_option("--sweep_values", cfg.sweep_values,
                   "comma-separated axis values")
        ->delimiter(',');

    app.add_option("--L", cfg.L, "distance in attenuation-length units")
        ->capture_default_str();
    app.add_option("--ndc", cfg.ndc,
                   "dark-count number fed to the closed formulas")
        ->capture_default_str();
    app.add_option("--x", cfg.x, "dilogarithm argument")
        ->capture_default_str();

    app.add_option("--trials", cfg.trials, "Monte Carlo trial count")
        ->capture_default_str();
    app.add_flag("--fixed_s,--fixed-s", cfg.fixed_s,
                 "rate: re-solve r per length for a fixed Bell deficit");
    app.add_option("--s_deficit,--s-deficit", cfg.s_deficit,
                   "Bell deficit held fixed in fixed_s mode")
        ->capture_default_str();

    CLI::App* sub_simulate =
        app.add_subcommand("simulate", "chain growth with per-level analysis");
    CLI::App* sub_sweep =
        app.add_subcommand("sweep", "repeat the chain over a parameter axis");
    CLI::App* sub_analytic =
        app.add_subcommand("analytic", "evaluate one closed formula by name");
    sub_analytic->add_option("formula", cfg.formula, "formula name")
        ->required();
    CLI::App* sub_compare = app.add_subcommand(
        "compare", "simulated Bell parameter against the summed formulas");
    CLI::App* sub_rate =
        app.add_subcommand("rate", "distribution rate per nesting level");
    CLI::App* sub_rate_mc = app.add_subcommand(
        "rate-mc", "Monte Carlo waiting-time estimate per nesting level");
    for (CLI::App* sub : {sub_simulate, sub_sweep, sub_analytic, sub_compare,
                          sub_rate, sub_rate_mc})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const ValidityError& e) {
        std::cerr << "validity error: " << e.what() << "\n";
        return 4;
    }
}
