#include "qrep/config.hpp"

#include "qrep/memories.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace qrep {

std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

DetectorKind RunConfig::detector_kind() const {
    if (detector == "counting") return DetectorKind::Counting;
    if (detector == "non_counting" || detector == "noncounting")
        return DetectorKind::NonCounting;
    throw ConfigError("unknown detector '" + detector +
                      "', expected counting or non_counting");
}

ReducedMemory RunConfig::build_memory() const {
    if (memory_kind == "ideal") return ideal_memory();
    if (memory_kind == "generic") {
        double b1_eff = b1;
        if (std::isnan(b1_eff)) {
            double sq = 1.0 - b2 * b2 + c1 * c1 + c2_re * c2_re +
                        c2_im * c2_im + c3 * c3;
            if (sq < 0.0)
                throw ConfigError("cannot complete b1: passive couplings "
                                  "exceed the unitarity budget");
            b1_eff = std::sqrt(sq);
        }
        return generic_memory(b1_eff, b2, c1, Complex(c2_re, c2_im), c3);
    }
    if (memory_kind == "two_pass") {
        TwoPassParams p;
        p.kappa = std::isnan(kappa) ? 2.0 : kappa;
        p.xi = xi;
        return two_pass(p);
    }
    if (memory_kind == "one_pass") {
        OnePassParams p;
        p.kappa = std::isnan(kappa) ? 1.0 : kappa;
        p.g = g;
        p.s = s;
        return one_pass(p);
    }
    throw ConfigError("unknown memory_kind '" + memory_kind +
                      "', expected ideal, generic, two_pass or one_pass");
}

RepeaterParams RunConfig::to_params() const {
    RepeaterParams p;
    p.r = r;
    p.p_gen = p_gen;
    p.p_con = p_con;
    p.n_dc_gen = n_dc_gen;
    p.n_dc_con = n_dc_con;
    p.detector = detector_kind();
    p.n = n;
    p.memory = build_memory();
    p.tau = tau;
    if (dark_path == "reduced")
        p.dark_path = DarkCountPath::Reduced;
    else if (dark_path == "explicit")
        p.dark_path = DarkCountPath::ExplicitCircuit;
    else
        throw ConfigError("unknown dark_path '" + dark_path +
                          "', expected reduced or explicit");
    return p;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    auto num = [](double v) {
        return std::isnan(v) ? std::string("auto") : format_number(v);
    };
    std::vector<std::pair<std::string, std::string>> kv = {
        {"b1", num(b1)},
        {"b2", num(b2)},
        {"c1", num(c1)},
        {"c2_im", num(c2_im)},
        {"c2_re", num(c2_re)},
        {"c3", num(c3)},
        {"cutoff", std::to_string(cutoff)},
        {"dark_path", dark_path},
        {"detector", detector},
        {"fixed_s", fixed_s ? "1" : "0"},
        {"formula", formula},
        {"g", num(g)},
        {"kappa", num(kappa)},
        {"L", num(L)},
        {"memory_kind", memory_kind},
        {"n", std::to_string(n)},
        {"n_dc_con", num(n_dc_con)},
        {"n_dc_gen", num(n_dc_gen)},
        {"ndc", num(ndc)},
        {"p_con", num(p_con)},
        {"p_gen", num(p_gen)},
        {"r", num(r)},
        {"s", num(s)},
        {"s_deficit", num(s_deficit)},
        {"seed", std::to_string(seed)},
        {"strict", strict ? "1" : "0"},
        {"sweep_param", sweep_param},
        {"sweep_values",
         [&] {
             std::string joined;
             for (size_t i = 0; i < sweep_values.size(); ++i) {
                 if (i) joined += ',';
                 joined += format_number(sweep_values[i]);
             }
             return joined;
         }()},
        {"tau", num(tau)},
        {"trials", std::to_string(trials)},
        {"x", num(x)},
        {"xi", num(xi)},
    };
    return kv;
}

void apply_parameter(RunConfig& cfg, const std::string& name, double value) {
    static const std::set<std::string> int_params = {"n", "cutoff"};
    if (int_params.count(name)) {
        double rounded = std::nearbyint(value);
        if (std::abs(value - rounded) > 1e-9)
            throw ConfigError("sweep parameter '" + name +
                              "' needs integer values");
        if (name == "n") cfg.n = static_cast<int>(rounded);
        else cfg.cutoff = static_cast<int>(rounded);
        return;
    }
    double* slot = nullptr;
    if (name == "r") slot = &cfg.r;
    else if (name == "p_gen") slot = &cfg.p_gen;
    else if (name == "p_con") slot = &cfg.p_con;
    else if (name == "n_dc_gen") slot = &cfg.n_dc_gen;
    else if (name == "n_dc_con") slot = &cfg.n_dc_con;
    else if (name == "tau") slot = &cfg.tau;
    else if (name == "b1") slot = &cfg.b1;
    else if (name == "b2") slot = &cfg.b2;
    else if (name == "c1") slot = &cfg.c1;
    else if (name == "c2_re") slot = &cfg.c2_re;
    else if (name == "c2_im") slot = &cfg.c2_im;
    else if (name == "c3") slot = &cfg.c3;
    else if (name == "kappa") slot = &cfg.kappa;
    else if (name == "xi") slot = &cfg.xi;
    else if (name == "g") slot = &cfg.g;
    else if (name == "s") slot = &cfg.s;
    else
        throw ConfigError("unknown sweep parameter '" + name + "'");
    *slot = value;
}

} // namespace qrep
