#include "rgs/explain.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

#include "rgs/rng.hpp"

namespace rgs {

namespace {

double sq_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

} // namespace

Centroids kmeans(const EncodedMatrix& m, std::size_t k, std::uint64_t seed) {
    const std::size_t n = m.rows.size();
    if (k == 0) throw DataError("cluster count must be positive");
    if (k > n)
        throw DataError("cluster count " + std::to_string(k) + " exceeds " +
                        std::to_string(n) + " rows; lower k or supply more data");

    Rng rng(derive_seed(seed, 0x3ea2));
    Centroids c;
    c.k = k;

    // k-means++ seeding
    std::vector<std::size_t> chosen;
    chosen.push_back(static_cast<std::size_t>(rng.bounded(n)));
    std::vector<double> d2(n);
    while (chosen.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = sq_distance(m.rows[i], m.rows[chosen[0]]);
            for (std::size_t j = 1; j < chosen.size(); ++j)
                best = std::min(best, sq_distance(m.rows[i], m.rows[chosen[j]]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // all remaining points coincide with a centroid; pick any
            chosen.push_back(static_cast<std::size_t>(rng.bounded(n)));
            continue;
        }
        double target = rng.real01() * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        chosen.push_back(pick);
    }
    for (std::size_t j : chosen) c.vectors.push_back(m.rows[j]);

    // Lloyd iterations to an assignment fixpoint (or 300 rounds)
    std::vector<std::size_t> assign(n, 0);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = iter == 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = sq_distance(m.rows[i], c.vectors[0]);
            for (std::size_t j = 1; j < k; ++j) {
                const double d = sq_distance(m.rows[i], c.vectors[j]);
                if (d < bd) {
                    bd = d;
                    best = j;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<std::vector<double>> sums(k, std::vector<double>(m.width, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[assign[i]]++;
            for (std::size_t f = 0; f < m.width; ++f) sums[assign[i]][f] += m.rows[i][f];
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                // empty cluster: move it onto the point farthest from its centroid
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_distance(m.rows[i], c.vectors[assign[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                c.vectors[j] = m.rows[far];
                assign[far] = j;
                continue;
            }
            for (std::size_t f = 0; f < m.width; ++f)
                c.vectors[j][f] = sums[j][f] / static_cast<double>(counts[j]);
        }
    }
    c.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) c.inertia += sq_distance(m.rows[i], c.vectors[assign[i]]);
    return c;
}

BackgroundVector background(const Centroids& c) {
    BackgroundVector bg(c.vectors[0].size(), 0.0);
    for (const auto& v : c.vectors)
        for (std::size_t f = 0; f < bg.size(); ++f) bg[f] += v[f];
    for (auto& x : bg) x /= static_cast<double>(c.k);
    return bg;
}

std::vector<double> synthetic_sample(std::span<const double> case_row,
                                     const BackgroundVector& bg,
                                     const EncodedMatrix& layout,
                                     const std::set<std::size_t>& subset, int include_i) {
    if (include_i >= 0 && subset.count(static_cast<std::size_t>(include_i)))
        throw DataError("include feature already present in the subset");
    std::vector<double> row(bg.begin(), bg.end());
    auto copy_block = [&](std::size_t feature) {
        const std::size_t start = layout.block_start[feature];
        const std::size_t width = layout.block_width[feature];
        for (std::size_t f = start; f < start + width; ++f) row[f] = case_row[f];
    };
    for (std::size_t f : subset) copy_block(f);
    if (include_i >= 0) copy_block(static_cast<std::size_t>(include_i));
    return row;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    double result = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        result *= static_cast<double>(n - i + 1) / static_cast<double>(i);
    return result;
}

} // namespace

std::vector<double> shap_exact(const Model& model, std::span<const double> case_row,
                               const BackgroundVector& bg, const EncodedMatrix& layout) {
    const std::size_t F = layout.block_start.size();
    if (F > 20)
        throw DataError("exact enumeration is bounded at 20 features; use sampled mode");

    // score every subset once: p[mask] with bit f = feature f takes the
    // case's value
    const std::size_t n_masks = std::size_t{1} << F;
    std::vector<double> p(n_masks);
    std::vector<double> row(bg.begin(), bg.end());
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        for (std::size_t f = 0; f < F; ++f) {
            const bool on = mask & (std::size_t{1} << f);
            const std::size_t start = layout.block_start[f];
            const std::size_t width = layout.block_width[f];
            for (std::size_t x = start; x < start + width; ++x)
                row[x] = on ? case_row[x] : bg[x];
        }
        p[mask] = model.score(row);
    }

    std::vector<double> phi(F, 0.0);
    const double inv_F = 1.0 / static_cast<double>(F);
    for (std::size_t f = 0; f < F; ++f) {
        const std::size_t bit = std::size_t{1} << f;
        double total = 0.0;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const auto s = static_cast<std::size_t>(std::popcount(mask));
            total += (p[mask | bit] - p[mask]) / binomial(F - 1, s);
        }
        phi[f] = inv_F * total;
    }
    return phi;
}

std::vector<double> shap_from_permutations(const Model& model,
                                           std::span<const double> case_row,
                                           const BackgroundVector& bg,
                                           const EncodedMatrix& layout,
                                           std::span<const std::vector<std::size_t>> perms) {
    const std::size_t F = layout.block_start.size();
    std::vector<double> phi(F, 0.0);
    std::vector<double> row(bg.begin(), bg.end());
    for (const auto& perm : perms) {
        row.assign(bg.begin(), bg.end());
        double prev = model.score(row);
        for (std::size_t f : perm) {
            const std::size_t start = layout.block_start[f];
            const std::size_t width = layout.block_width[f];
            for (std::size_t x = start; x < start + width; ++x) row[x] = case_row[x];
            const double cur = model.score(row);
            phi[f] += cur - prev;
            prev = cur;
        }
    }
    for (auto& v : phi) v /= static_cast<double>(perms.size());
    return phi;
}

std::vector<double> shap_sampled(const Model& model, std::span<const double> case_row,
                                 const BackgroundVector& bg, const EncodedMatrix& layout,
                                 std::size_t n_permutations, std::uint64_t seed) {
    if (n_permutations == 0) throw DataError("permutation count must be positive");
    const std::size_t F = layout.block_start.size();

    // when the request covers the whole permutation space, enumerate each
    // distinct ordering once; the estimator then equals the exact value
    double factorial = 1.0;
    bool exhaustive = F <= 12;
    for (std::size_t i = 2; i <= F && exhaustive; ++i) {
        factorial *= static_cast<double>(i);
        if (factorial > static_cast<double>(n_permutations)) exhaustive = false;
    }
    std::vector<std::vector<std::size_t>> perms;
    if (exhaustive) {
        std::vector<std::size_t> perm(F);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            perms.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        Rng rng(derive_seed(seed, 0x54a9));
        std::vector<std::size_t> perm(F);
        std::iota(perm.begin(), perm.end(), 0);
        perms.reserve(n_permutations);
        for (std::size_t i = 0; i < n_permutations; ++i) {
            rng.shuffle(perm);
            perms.push_back(perm);
        }
    }
    return shap_from_permutations(model, case_row, bg, layout, perms);
}

ShapAggregate aggregate(const ShapValues& values,
                        const std::vector<std::vector<double>>& raw_normalized) {
    if (values.phi.empty()) throw DataError("no explanations to aggregate");
    const std::size_t F = values.phi[0].size();
    ShapAggregate agg;
    agg.bar_values.assign(F, 0.0);
    for (const auto& case_phi : values.phi)
        for (std::size_t f = 0; f < F; ++f) agg.bar_values[f] += std::abs(case_phi[f]);
    for (auto& v : agg.bar_values) v /= static_cast<double>(values.phi.size());

    agg.bar_order.resize(F);
    std::iota(agg.bar_order.begin(), agg.bar_order.end(), 0);
    std::stable_sort(agg.bar_order.begin(), agg.bar_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return agg.bar_values[a] > agg.bar_values[b];
                     });

    for (std::size_t c = 0; c < values.phi.size(); ++c)
        for (std::size_t f = 0; f < F; ++f)
            agg.points.push_back({f, values.phi[c][f], raw_normalized[c][f]});
    return agg;
}

ShapValues explain_dataset(const TrainedModel& model, const Dataset& train_reference,
                           const Dataset& cases, std::size_t k_clusters,
                           std::size_t n_permutations, std::size_t exact_limit,
                           std::uint64_t seed, std::size_t workers) {
    // explanations run in one-hot space for every family; the categorical
    // NB reads fractional blocks as category mixtures
    const EncodedMatrix train_enc = encode(train_reference, EncodeMode::OneHot);
    const EncodedMatrix case_enc = encode(cases, EncodeMode::OneHot);
    const Centroids cents = kmeans(train_enc, k_clusters, derive_seed(seed, 0xce27));
    const BackgroundVector bg = background(cents);

    ShapValues out;
    for (const auto& col : cases.schema().predictors()) out.feature_names.push_back(col.name);
    const std::size_t F = out.feature_names.size();
    out.mode = F <= exact_limit ? "exact" : ("sampled(" + std::to_string(n_permutations) + ")");
    out.base_value = model.impl->score(bg);
    out.phi.resize(cases.n_cases());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cases.n_cases()) break;
            if (F <= exact_limit)
                out.phi[i] = shap_exact(*model.impl, case_enc.rows[i], bg, case_enc);
            else
                out.phi[i] = shap_sampled(*model.impl, case_enc.rows[i], bg, case_enc,
                                          n_permutations, derive_seed(seed, 0xca5e, i));
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

} // namespace rgs
