#include "qrep/repeater.hpp"

#include <cmath>
#include <random>
#include <thread>

namespace qrep {

void RepeaterParams::validate() const {
    if (!(r >= 0.0)) throw ConfigError("squeezing parameter r must be >= 0");
    if (p_gen < 0.0 || p_gen > 1.0 || p_con < 0.0 || p_con > 1.0)
        throw ConfigError("loss probabilities must lie in [0, 1]");
    if (n_dc_gen < 0.0 || n_dc_con < 0.0)
        throw ConfigError("dark-count rates must be >= 0");
    if (n < 0) throw ConfigError("nesting level must be >= 0");
    if (!(tau > 0.0)) throw ConfigError("communication time tau must be > 0");
    memory.validate();
}

namespace {

ModeFate click_fate(DetectorKind k) {
    return k == DetectorKind::Counting ? ModeFate::CountingClick
                                       : ModeFate::NonCountingClick;
}

bool is_identity(const ReducedMemory& m) {
    return m.b1 == 1.0 && m.b2 == 0.0 && m.c1 == 0.0 && m.c2 == Complex(0.0) &&
           m.c3 == 0.0;
}

// Memory row followed by transmission loss and detector dark counts, in
// closed form.  Dark counts are modelled as thermal light entering through
// the loss port, with the lossless case handled by its exact limit.
ReducedMemory fold_loss_and_dark(const ReducedMemory& m, double loss, double n_dc) {
    if (loss > 0.0) {
        double s = n_dc > 0.0 ? std::asinh(std::sqrt(n_dc / loss)) : 0.0;
        return augment_dark_counts_virtual(m, loss, s);
    }
    if (n_dc > 0.0) return augment_dark_counts(m, n_dc);
    return m;
}

struct MeasuredCircuit {
    BogoliubovMap map;
    SqueezePrefix prefix;
    ModeRoles roles;
};

// Shared tail of the generation and connection circuits: arm modes 1 and 2
// interfere on a balanced splitter, one detector clicks, the other must
// stay dark, modes 0 and 3 are kept.
ModeRoles detection_roles(int total, DetectorKind det, bool inputs) {
    ModeRoles roles;
    roles.fate.assign(total, ModeFate::Traced);
    roles.is_input.assign(total, false);
    roles.fate[0] = roles.fate[3] = ModeFate::Output;
    roles.fate[1] = click_fate(det);
    roles.fate[2] = ModeFate::Dark;
    if (inputs)
        for (int m = 0; m < 4; ++m) roles.is_input[m] = true;
    return roles;
}

// Appends the loss-plus-dark-count stage for one detector arm as explicit
// optics: the loss splitter's second port is fed by one half of a
// two-mode-squeezed source instead of vacuum.
void append_explicit_loss(std::vector<CircuitElement>& elems, SqueezePrefix& prefix,
                          int& total, int arm, double loss, double n_dc) {
    if (loss == 0.0) {
        if (n_dc > 0.0)
            throw ConfigError("explicit dark-count circuit needs nonzero loss to attach to");
        return;
    }
    if (n_dc > 0.0) {
        double s = std::asinh(std::sqrt(n_dc / loss));
        prefix.push_back({total, total + 1, s});
        elems.push_back(lossy_channel(loss, arm, total));
        total += 2;
    } else {
        elems.push_back(lossy_channel(loss, arm, total));
        total += 1;
    }
}

MeasuredCircuit generation_circuit(const RepeaterParams& p) {
    std::vector<CircuitElement> elems;
    SqueezePrefix prefix{{0, 1, p.r}, {2, 3, p.r}};
    int total = 4;
    if (p.dark_path == DarkCountPath::Reduced) {
        ReducedMemory arm = fold_loss_and_dark(ideal_memory(), p.p_gen, p.n_dc_gen);
        if (!is_identity(arm))
            for (int mode : {1, 2}) {
                elems.push_back(CircuitElement::memory_element(arm, mode, total, total + 1));
                total += 2;
            }
    } else {
        for (int mode : {1, 2})
            append_explicit_loss(elems, prefix, total, mode, p.p_gen, p.n_dc_gen);
    }
    elems.push_back(CircuitElement::beam_splitter(0.5, 1, 2));
    return {compose_circuit(elems, total), std::move(prefix),
            detection_roles(total, p.detector, false)};
}

MeasuredCircuit connection_circuit(const RepeaterParams& p) {
    std::vector<CircuitElement> elems;
    SqueezePrefix prefix;
    int total = 4;
    if (p.dark_path == DarkCountPath::Reduced) {
        ReducedMemory eff = fold_loss_and_dark(p.memory, p.p_con, p.n_dc_con);
        if (!is_identity(eff))
            for (int mode : {1, 2}) {
                elems.push_back(CircuitElement::memory_element(eff, mode, total, total + 1));
                total += 2;
            }
    } else {
        for (int mode : {1, 2}) {
            if (!is_identity(p.memory)) {
                elems.push_back(CircuitElement::memory_element(p.memory, mode, total, total + 1));
                total += 2;
            }
            append_explicit_loss(elems, prefix, total, mode, p.p_con, p.n_dc_con);
        }
    }
    elems.push_back(CircuitElement::beam_splitter(0.5, 1, 2));
    return {compose_circuit(elems, total), std::move(prefix),
            detection_roles(total, p.detector, true)};
}

} // namespace

ConditionalState generate(const RepeaterParams& params, int cutoff) {
    params.validate();
    if (cutoff < 1) throw ConfigError("generation needs cutoff >= 1");
    if (params.r > 0.0 && cutoff < 2)
        throw ConfigError("cutoff >= 2 required when the pair source is on");
    MeasuredCircuit mc = generation_circuit(params);
    GenFunBuild f = build_genfun(mc.map, mc.prefix, mc.roles);
    TransferTensor t = extract_tensor(f, cutoff, cutoff);
    FockDensityMatrix out = apply_tensor(t, FockDensityMatrix::vacuum(0, cutoff));
    double w = out.trace();
    if (!(w > 1e-300)) throw NumericalError("generation success probability vanished");
    ConditionalState res{std::move(out), 2.0 * w};
    res.rho.normalize();
    return res;
}

TransferTensor connection_tensor(const RepeaterParams& params, int cutoff) {
    params.validate();
    if (cutoff < 1) throw ConfigError("connection needs cutoff >= 1");
    MeasuredCircuit mc = connection_circuit(params);
    GenFunBuild f = build_genfun(mc.map, mc.prefix, mc.roles);
    return extract_tensor(f, cutoff, cutoff);
}

ConditionalState connect_with(const TransferTensor& t, const FockDensityMatrix& left,
                              const FockDensityMatrix& right) {
    if (left.mode_count() != 2 || right.mode_count() != 2)
        throw ConfigError("connection inputs must be two-mode states");
    if (left.cutoff() != right.cutoff())
        throw ConfigError("connection inputs must share a cutoff");
    FockDensityMatrix out = apply_tensor(t, tensor(left, right));
    double w = out.trace();
    if (!(w > 1e-300)) throw NumericalError("connection success probability vanished");
    ConditionalState res{std::move(out), 2.0 * w};
    res.rho.normalize();
    return res;
}

ConditionalState connect(const FockDensityMatrix& left, const FockDensityMatrix& right,
                         const RepeaterParams& params) {
    return connect_with(connection_tensor(params, left.cutoff()), left, right);
}

ChainResult run_chain(const RepeaterParams& params, int cutoff) {
    ConditionalState g = generate(params, cutoff);
    ChainResult res{std::move(g.rho), {g.q}, {g.q / 2.0}};
    if (params.n > 0) {
        TransferTensor t = connection_tensor(params, cutoff);
        for (int k = 1; k <= params.n; ++k) {
            ConditionalState c = connect_with(t, res.rho, res.rho);
            res.q.push_back(c.q);
            res.raw_weights.push_back(c.q / 2.0);
            res.rho = std::move(c.rho);
        }
    }
    return res;
}

BellResult bell(const FockDensityMatrix& rho, const RepeaterParams& params,
                const BellOptions& options) {
    params.validate();
    if (rho.mode_count() != 2)
        throw ConfigError("postselection needs a two-mode state");
    if (options.loss < 0.0 || options.loss > 1.0)
        throw ConfigError("postselection loss must lie in [0, 1]");
    if (options.n_dc < 0.0)
        throw ConfigError("postselection dark counts must be >= 0");
    const int c = rho.cutoff();
    const DetectorKind det = options.detector.value_or(params.detector);
    options.memory.validate();
    const ReducedMemory stage =
        fold_loss_and_dark(options.memory, options.loss, options.n_dc);
    const bool staged = !is_identity(stage);
    // Two copies share each end: left arms are modes 0 and 2, right arms 1
    // and 3.  Each end gets a phase on its first arm and a balanced mixer.
    FockDensityMatrix joint = tensor(rho, rho);

    const std::array<std::pair<double, double>, 4> settings{{
        {options.left_angles[0], options.right_angles[0]},
        {options.left_angles[1], options.right_angles[0]},
        {options.left_angles[1], options.right_angles[1]},
        {options.left_angles[0], options.right_angles[1]},
    }};

    BellResult out;
    double weight_sum = 0.0;
    for (int s = 0; s < 4; ++s) {
        const int total = staged ? 12 : 4;
        std::vector<CircuitElement> elems;
        elems.push_back(CircuitElement::phase_shift(settings[s].first, 0));
        elems.push_back(CircuitElement::phase_shift(settings[s].second, 1));
        if (staged)
            for (int m = 0; m < 4; ++m)
                elems.push_back(CircuitElement::memory_element(stage, m, 4 + 2 * m,
                                                               5 + 2 * m));
        elems.push_back(CircuitElement::beam_splitter(0.5, 0, 2));
        elems.push_back(CircuitElement::beam_splitter(0.5, 1, 3));
        BogoliubovMap map = compose_circuit(elems, total);

        double w[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                ModeRoles roles;
                roles.fate.assign(total, ModeFate::Traced);
                roles.is_input.assign(total, false);
                for (int m = 0; m < 4; ++m) roles.is_input[m] = true;
                roles.fate[a == 0 ? 0 : 2] = click_fate(det);
                roles.fate[a == 0 ? 2 : 0] = ModeFate::Dark;
                roles.fate[b == 0 ? 1 : 3] = click_fate(det);
                roles.fate[b == 0 ? 3 : 1] = ModeFate::Dark;
                GenFunBuild f = build_genfun(map, {}, roles);
                TransferTensor t = extract_tensor(f, c, 0);
                w[a][b] = apply_tensor(t, joint).trace();
            }
        double sum = w[0][0] + w[0][1] + w[1][0] + w[1][1];
        if (!(sum > 1e-300)) throw NumericalError("postselection weight vanished");
        out.p_same[s] = (w[0][0] + w[1][1]) / sum;
        out.p_diff[s] = (w[0][1] + w[1][0]) / sum;
        out.E[s] = out.p_same[s] - out.p_diff[s];
        weight_sum += sum;
    }
    out.S = out.E[0] + out.E[1] + out.E[2] - out.E[3];
    out.q_ps = weight_sum / 4.0;
    if (std::abs(out.S) > 2.0 * std::numbers::sqrt2 + 1e-9)
        throw NumericalError("Bell parameter exceeded the quantum bound");
    return out;
}

double two_success_tries(double q) {
    if (!(q > 0.0) || q > 1.0)
        throw ConfigError("success probabilities must lie in (0, 1]");
    return (3.0 - 2.0 * q) / ((2.0 - q) * q);
}

RateResult rate(double tau, const std::vector<double>& q_list, double q_ps) {
    if (!(tau > 0.0)) throw ConfigError("communication time tau must be > 0");
    if (q_list.empty())
        throw ConfigError("rate needs at least the generation probability");
    if (!(q_ps > 0.0) || q_ps > 1.0)
        throw ConfigError("postselection probability must lie in (0, 1]");
    double log_tries = 0.0, log_q = 0.0;
    for (double q : q_list) {
        log_tries += std::log(two_success_tries(q));
        log_q += std::log(q);
    }
    const int n = static_cast<int>(q_list.size()) - 1;
    RateResult r;
    r.log_exact = std::log(q_ps) - std::log(tau) - log_tries;
    r.log_simplified =
        (n + 1) * std::log(2.0 / 3.0) + log_q + std::log(q_ps) - std::log(tau);
    r.exact = std::exp(r.log_exact);
    r.simplified = std::exp(r.log_simplified);
    return r;
}

namespace {

// Rounds until both members of a pair have succeeded, each with probability
// q per round: the larger of two geometric draws.
long pair_rounds(double q, std::mt19937_64& rng) {
    if (q >= 1.0) return 1;
    std::geometric_distribution<long> extra(q);
    return 1 + std::max(extra(rng), extra(rng));
}

// One realization of the time to deliver a level-k pair.  The two halves
// retry in lockstep rounds until both have succeeded; every round rebuilds
// the level below and pays this level's classical signalling time.  Waiting
// times are then products of independent round counts, matching the model
// behind the closed-form mean.
double sample_level_time(int k, const std::vector<double>& q, double tau,
                         std::mt19937_64& rng) {
    if (k == 0) return tau * static_cast<double>(pair_rounds(q[0], rng));
    const double comm = tau * std::ldexp(1.0, k - 1);
    const long rounds = pair_rounds(q[k], rng);
    double total = 0.0;
    for (long i = 0; i < rounds; ++i)
        total += sample_level_time(k - 1, q, tau, rng) + comm;
    return total;
}

} // namespace

MonteCarloResult rate_monte_carlo(double tau, const std::vector<double>& q_list,
                                  double q_ps, long trials, unsigned long long seed) {
    if (!(tau > 0.0)) throw ConfigError("communication time tau must be > 0");
    if (q_list.empty())
        throw ConfigError("rate needs at least the generation probability");
    for (double q : q_list) two_success_tries(q);
    if (!(q_ps > 0.0) || q_ps > 1.0)
        throw ConfigError("postselection probability must lie in (0, 1]");
    if (trials < 1) throw ConfigError("trials must be >= 1");

    const int n = static_cast<int>(q_list.size()) - 1;
    // Trials are striped over a fixed number of independent streams so the
    // result depends only on the seed, not on the worker count.
    constexpr int streams = 16;
    std::array<double, streams> sums{}, squares{};
    std::array<long, streams> counts{};
    for (int s = 0; s < streams; ++s)
        counts[s] = trials / streams + (s < trials % streams ? 1 : 0);

    auto run_stream = [&](int s) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
        std::bernoulli_distribution kept(q_ps);
        double sum = 0.0, square = 0.0;
        for (long i = 0; i < counts[s]; ++i) {
            double t = 0.0;
            do {
                t += sample_level_time(n, q_list, tau, rng);
            } while (!kept(rng));
            sum += t;
            square += t * t;
        }
        sums[s] = sum;
        squares[s] = square;
    };

    unsigned workers = std::max(1u, std::min<unsigned>(
                                        streams, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (int s = 0; s < streams; ++s) run_stream(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int s = static_cast<int>(w); s < streams; s += workers)
                    run_stream(s);
            });
        for (std::thread& th : pool) th.join();
    }

    double sum = 0.0, square = 0.0;
    for (int s = 0; s < streams; ++s) {
        sum += sums[s];
        square += squares[s];
    }
    MonteCarloResult res;
    res.mean_time = sum / static_cast<double>(trials);
    if (trials > 1) {
        double var = (square - sum * sum / static_cast<double>(trials)) /
                     static_cast<double>(trials - 1);
        res.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(trials));
    }
    res.rate = 1.0 / res.mean_time;
    return res;
}

} // namespace qrep
