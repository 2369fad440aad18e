#ifndef GSAUDIT_ENRICHMENT_GOSEQ_HPP
#define GSAUDIT_ENRICHMENT_GOSEQ_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "../corpus.hpp"
#include "../diffexpr.hpp"
#include "../error.hpp"
#include "../parallel.hpp"
#include "../random.hpp"
#include "../stats.hpp"
#include "ora.hpp"
#include "table.hpp"

/**
 * @file goseq.hpp
 * @brief Bias-corrected over-representation: probability weighting function, Wallenius tail and resampling.
 */

namespace gsaudit {

/**
 * Probability weighting function: isotonic (non-decreasing) regression of the 0/1 indicator on the bias covariate,
 * by pool-adjacent-violators. Genes with equal covariate share one fitted value.
 * Fitted values are clipped to `[1/(2m), 1 - 1/(2m)]` for `m` genes and returned in input order.
 */
inline std::vector<double> pwf_fit(std::span<const int> indicator, std::span<const double> bias) {
    const std::size_t m = indicator.size();
    if (bias.size() != m) {
        throw Error(Errc::InvalidConfig, "indicator and covariate lengths differ");
    }
    std::size_t positives = std::count_if(indicator.begin(), indicator.end(), [](int v) { return v != 0; });
    if (positives == 0 || positives == m) {
        throw Error(Errc::DegeneratePwf, positives == 0 ? "no differentially expressed genes" : "every gene is differentially expressed");
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bias[a] < bias[b]; });

    struct Block {
        double sum;
        double weight;
        std::size_t first, last; // positions in `order`, inclusive
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i;
        double sum = 0;
        while (j < m && bias[order[j]] == bias[order[i]]) {
            sum += indicator[order[j]] != 0;
            ++j;
        }
        blocks.push_back(Block{sum, static_cast<double>(j - i), i, j - 1});
        while (blocks.size() > 1) {
            auto& prev = blocks[blocks.size() - 2];
            auto& last = blocks.back();
            if (prev.sum / prev.weight <= last.sum / last.weight) {
                break;
            }
            prev.sum += last.sum;
            prev.weight += last.weight;
            prev.last = last.last;
            blocks.pop_back();
        }
        i = j;
    }

    const double lo = 1.0 / (2.0 * static_cast<double>(m));
    const double hi = 1.0 - lo;
    std::vector<double> fitted(m);
    for (const auto& b : blocks) {
        double value = std::clamp(b.sum / b.weight, lo, hi);
        for (std::size_t i = b.first; i <= b.last; ++i) {
            fitted[order[i]] = value;
        }
    }
    return fitted;
}

namespace detail {

/**
 * Adaptive Simpson on `[a, b]` with absolute tolerance `eps`.
 */
template<class Function>
double adaptive_simpson_step(const Function& f, double a, double b, double fa, double fm, double fb, double whole, double eps, int depth) {
    double m = (a + b) / 2;
    double lm = (a + m) / 2, rm = (m + b) / 2;
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * eps) {
        return left + right + delta / 15;
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, eps / 2, depth - 1)
         + adaptive_simpson_step(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

template<class Function>
double adaptive_simpson(const Function& f, double a, double b, double eps, int panels = 1, int depth = 50) {
    if (!(b > a)) {
        return 0;
    }
    double total = 0;
    const double width = (b - a) / panels;
    double fa = f(a);
    for (int i = 0; i < panels; ++i) {
        double lo = a + width * i;
        double hi = (i + 1 == panels) ? b : a + width * (i + 1);
        double mid = (lo + hi) / 2;
        double fm = f(mid), fb = f(hi);
        double whole = (hi - lo) / 6 * (fa + 4 * fm + fb);
        total += adaptive_simpson_step(f, lo, hi, fa, fm, fb, whole, eps / panels, depth);
        fa = fb;
    }
    return total;
}

/**
 * Integrates `exp(log_f(u))` over `[0, 1]` for a unimodal log-integrand.
 * The peak is located by golden-section search; the window where the log-integrand stays within 40 of its maximum
 * is integrated on a fine grid and the two flanks adaptively.
 */
template<class LogFunction>
double integrate_peaked(const LogFunction& log_f, double eps) {
    auto f = [&](double u) {
        double v = log_f(u);
        return std::isnan(v) ? 0.0 : std::exp(v);
    };

    const double phi = (std::sqrt(5.0) - 1) / 2;
    double a = 0, b = 1;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = log_f(c), fd = log_f(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = log_f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = log_f(c);
        }
    }
    const double peak = (a + b) / 2;
    const double top = std::max({log_f(peak), log_f(0), log_f(1)});
    if (top == -std::numeric_limits<double>::infinity() || std::isnan(top)) {
        return 0;
    }
    const double drop = top - 40;

    auto boundary = [&](double inside, double outside) {
        if (!(log_f(outside) < drop)) {
            return outside;
        }
        for (int it = 0; it < 100; ++it) {
            double mid = (inside + outside) / 2;
            if (log_f(mid) < drop) {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        return outside;
    };
    const double left = boundary(peak, 0.0);
    const double right = boundary(peak, 1.0);

    return adaptive_simpson(f, 0.0, left, eps / 4, 4)
         + adaptive_simpson(f, left, right, eps / 2, 32)
         + adaptive_simpson(f, right, 1.0, eps / 4, 4);
}

}

/**
 * `P(X = x)` under the two-colour Wallenius noncentral hypergeometric distribution with odds `omega`,
 * `C(K,x) C(N-K,n-x) * integral_0^1 (1 - t^(omega/D))^x (1 - t^(1/D))^(n-x) dt` with `D = omega (K - x) + (N - K - (n - x))`.
 * Degenerate draws (`n == 0` or `n == N`) are handled exactly.
 */
inline double wallenius_pmf(long long x, long long N, long long K, long long n, double omega, double eps = 1e-9) {
    const long long lo = std::max(0LL, n + K - N), hi = std::min(K, n);
    if (x < lo || x > hi) {
        return 0;
    }
    if (n == 0 || n == N) {
        return 1;
    }
    const double D = omega * static_cast<double>(K - x) + static_cast<double>(N - K - (n - x));
    const double log_c = stats::log_choose(K, x) + stats::log_choose(N - K, n - x);
    const double xd = static_cast<double>(x), yd = static_cast<double>(n - x);

    // Power terms are only added for positive exponents so endpoint evaluations never form 0 * -inf.
    if (D >= 1) {
        // t = u^D turns the integrand into D u^(D-1) (1 - u^omega)^x (1 - u)^(n-x), which is smooth on [0, 1].
        auto log_f = [&](double u) {
            double v = log_c + std::log(D);
            if (D > 1) {
                v += (D - 1) * std::log(u);
            }
            if (x > 0) {
                v += xd * std::log1p(-std::pow(u, omega));
            }
            if (n - x > 0) {
                v += yd * std::log1p(-u);
            }
            return v;
        };
        return detail::integrate_peaked(log_f, eps);
    }

    auto log_f = [&](double t) {
        double v = log_c;
        if (x > 0) {
            v += xd * std::log1p(-std::pow(t, omega / D));
        }
        if (n - x > 0) {
            v += yd * std::log1p(-std::pow(t, 1 / D));
        }
        return v;
    };
    return detail::integrate_peaked(log_f, eps);
}

/**
 * Upper tail `P(X >= k)` of the Wallenius distribution. Terms are summed over the shorter side of the support
 * relative to the central mean, stopping once decreasing terms become negligible.
 */
inline double wallenius_tail(long long k, long long N, long long K, long long n, double omega) {
    detail::check_contingency(k, N, K, n);
    if (!(omega > 0) || !std::isfinite(omega)) {
        throw Error(Errc::NonpositiveOdds, std::to_string(omega));
    }
    const long long lo = std::max(0LL, n + K - N), hi = std::min(K, n);
    if (k <= lo || n == N) {
        return 1;
    }

    auto accumulate = [&](long long from, long long to, long long step) {
        double sum = 0, prev = -1;
        for (long long x = from; step > 0 ? x <= to : x >= to; x += step) {
            double term = wallenius_pmf(x, N, K, n, omega);
            sum += term;
            if (prev >= 0 && term < prev && term < 1e-17 * sum) {
                break;
            }
            prev = term;
        }
        return sum;
    };

    const double central_mean = static_cast<double>(n) * static_cast<double>(K) / static_cast<double>(N);
    if (static_cast<double>(k) >= central_mean || omega > 1) {
        double upper = accumulate(k, hi, 1);
        return std::clamp(upper, 0.0, 1.0);
    }
    double lower = accumulate(k - 1, lo, -1);
    return std::clamp(1.0 - lower, 0.0, 1.0);
}

enum class PvalueMethod { Wallenius, Resampling };
enum class BiasKind { TranscriptLength, MeanExpression };

inline constexpr std::string_view pvalue_method_name(PvalueMethod m) { return m == PvalueMethod::Wallenius ? "wallenius" : "resampling"; }
inline constexpr std::string_view bias_name(BiasKind b) { return b == BiasKind::TranscriptLength ? "transcript-length" : "mean-expression"; }

struct GoseqOptions {
    PvalueMethod method = PvalueMethod::Wallenius;
    UniverseChoice universe = UniverseChoice::AnnotatedGenes;
    int resamples = 1000;
    int num_threads = 1;
};

/**
 * Over-representation corrected for a per-gene detection bias.
 *
 * @param de_genes Differentially expressed genes, a subset of `tested`.
 * @param tested All genes tested for differential expression.
 * @param bias Bias covariate for each entry of `tested`, e.g. transcript length.
 * @param sets Gene set collection.
 * @param options Method and universe choice.
 * @param seed Master seed for the resampling null.
 *
 * The PWF is fitted over the universe; each set's odds are the ratio of the odds of the mean weight inside versus
 * outside the set. The Wallenius p-value uses those odds; the resampling p-value draws as many genes as were observed
 * DE, without replacement and with probability proportional to the weight's odds, and counts replicates whose overlap reaches the
 * observed one, with a pseudo-count.
 */
inline EnrichmentTable goseq(const std::vector<std::string>& de_genes, const std::vector<std::string>& tested, std::span<const double> bias,
                             const GeneSetCollection& sets, const GoseqOptions& options, std::uint64_t seed)
{
    if (bias.size() != tested.size()) {
        throw Error(Errc::BiasUnavailable, "covariate missing for some tested genes");
    }
    std::unordered_map<std::string, std::size_t> tested_index;
    for (std::size_t i = 0; i < tested.size(); ++i) {
        tested_index.emplace(tested[i], i);
    }

    // Universe as positions into `tested`, in tested order.
    std::vector<char> in_universe(tested.size(), options.universe == UniverseChoice::AllTestedGenes);
    std::vector<std::vector<std::size_t>> members(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (const auto& m : sets.sets()[s].members) {
            auto it = tested_index.find(m);
            if (it != tested_index.end()) {
                members[s].push_back(it->second);
                in_universe[it->second] = 1;
            }
        }
    }
    std::vector<std::size_t> universe;
    std::vector<long long> universe_pos(tested.size(), -1);
    for (std::size_t i = 0; i < tested.size(); ++i) {
        if (in_universe[i]) {
            universe_pos[i] = static_cast<long long>(universe.size());
            universe.push_back(i);
        }
    }
    if (universe.empty()) {
        throw Error(Errc::EmptyUniverse, sets.name());
    }

    std::vector<char> is_de(tested.size(), 0);
    for (const auto& g : de_genes) {
        auto it = tested_index.find(g);
        if (it != tested_index.end()) {
            is_de[it->second] = 1;
        }
    }
    std::vector<int> indicator(universe.size());
    std::vector<double> covariate(universe.size());
    long long n = 0;
    for (std::size_t u = 0; u < universe.size(); ++u) {
        indicator[u] = is_de[universe[u]];
        covariate[u] = bias[universe[u]];
        n += indicator[u];
    }
    const auto weights = pwf_fit(indicator, covariate);
    const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    const long long N = static_cast<long long>(universe.size());

    struct SetStats {
        std::size_t index;
        long long K, k;
        double omega;
    };
    std::vector<SetStats> tested_sets;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        long long K = static_cast<long long>(members[s].size()), k = 0;
        double inside = 0;
        for (auto g : members[s]) {
            k += is_de[g];
            inside += weights[universe_pos[g]];
        }
        if (K == 0) {
            continue;
        }
        double omega = 1;
        if (K < N) {
            double mean_in = inside / static_cast<double>(K);
            double mean_out = (total_weight - inside) / static_cast<double>(N - K);
            mean_out = std::clamp(mean_out, 1e-12, 1 - 1e-12);
            omega = (mean_in / (1 - mean_in)) / (mean_out / (1 - mean_out));
        }
        tested_sets.push_back(SetStats{s, K, k, omega});
    }
    if (tested_sets.empty()) {
        throw Error(Errc::EmptyTable, "no set overlaps the universe");
    }

    std::vector<double> raw(tested_sets.size());
    if (options.method == PvalueMethod::Wallenius) {
        parallel_for(tested_sets.size(), options.num_threads, [&](std::size_t i) {
            const auto& st = tested_sets[i];
            raw[i] = wallenius_tail(st.k, N, st.K, n, st.omega);
        });
    } else {
        const std::size_t R = static_cast<std::size_t>(std::max(1, options.resamples));
        std::vector<std::vector<int>> exceed(R, std::vector<int>(tested_sets.size(), 0));
        parallel_for(R, options.num_threads, [&](std::size_t r) {
            Rng rng(derive_seed(seed, "goseq-resample", r));
            std::vector<std::pair<double, std::size_t>> keys(universe.size());
            for (std::size_t u = 0; u < universe.size(); ++u) {
                keys[u] = {std::log(1 - uniform_real(rng)) * (1 - weights[u]) / weights[u], u};
            }
            std::nth_element(keys.begin(), keys.begin() + n, keys.end(), std::greater<>());
            std::vector<char> draw(tested.size(), 0);
            for (long long j = 0; j < n; ++j) {
                draw[universe[keys[j].second]] = 1;
            }
            for (std::size_t i = 0; i < tested_sets.size(); ++i) {
                long long overlap = 0;
                for (auto g : members[tested_sets[i].index]) {
                    overlap += draw[g];
                }
                exceed[r][i] = overlap >= tested_sets[i].k;
            }
        });
        for (std::size_t i = 0; i < tested_sets.size(); ++i) {
            long long count = 0;
            for (std::size_t r = 0; r < R; ++r) {
                count += exceed[r][i];
            }
            raw[i] = static_cast<double>(1 + count) / static_cast<double>(1 + R);
        }
    }

    for (auto& p : raw) {
        p = std::max(p, std::numeric_limits<double>::min());
    }
    EnrichmentTable table;
    table.engine = Engine::Goseq;
    auto adj = bh_adjust(raw);
    for (std::size_t i = 0; i < tested_sets.size(); ++i) {
        const auto& st = tested_sets[i];
        double ratio = n == 0 ? 0 : (static_cast<double>(st.k) / static_cast<double>(n)) / (static_cast<double>(st.K) / static_cast<double>(N));
        table.rows.push_back(EnrichmentRow{sets.sets()[st.index].name, ratio, raw[i], adj[i], 0, 1, false});
    }
    detail::order_rows(table.rows);
    return assemble_ranks(std::move(table));
}

}

#endif
