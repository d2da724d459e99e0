#include "dpcpower/selection.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <string>

#include "dpcpower/errors.hpp"

namespace dpcpower {

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
    case Algorithm::nus: return "NUS";
    case Algorithm::sus: return "SUS";
    case Algorithm::aus: return "AUS";
    case Algorithm::rus: return "RUS";
    case Algorithm::exhaustive: return "EXHAUSTIVE";
    }
    return "UNKNOWN";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Algorithm a : {Algorithm::nus, Algorithm::sus, Algorithm::aus, Algorithm::rus,
                        Algorithm::exhaustive}) {
        if (upper == to_string(a)) {
            return a;
        }
    }
    return std::nullopt;
}

void check_selection_size(const ChannelSet& channels, int selected) {
    const int limit = std::min(channels.antennas(), channels.user_count());
    if (selected < 1 || selected > limit) {
        throw ConfigError("Ks=" + std::to_string(selected) + " must lie in [1, min(M=" +
                          std::to_string(channels.antennas()) + ", K=" +
                          std::to_string(channels.user_count()) + ")]");
    }
}

namespace {

std::vector<double> norms_of(const ChannelSet& channels) {
    std::vector<double> n;
    n.reserve(static_cast<std::size_t>(channels.user_count()));
    for (const auto& h : channels.vectors()) {
        n.push_back(squared_norm(h));
    }
    return n;
}

int argmax_unselected(const std::vector<double>& score, const std::vector<bool>& taken) {
    int best = -1;
    for (std::size_t k = 0; k < score.size(); ++k) {
        if (taken[k]) {
            continue;
        }
        if (best < 0 || score[k] > score[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(k);
        }
    }
    return best;
}

std::vector<int> weakest_first(std::vector<int> users, const std::vector<double>& norms) {
    std::stable_sort(users.begin(), users.end(), [&](int a, int b) {
        const double na = norms[static_cast<std::size_t>(a)];
        const double nb = norms[static_cast<std::size_t>(b)];
        return na < nb || (na == nb && a < b);
    });
    return users;
}

// Shared driver for the greedy SUS/AUS loops.
template <class Score>
std::vector<int> greedy_select(const ChannelSet& channels, int selected,
                               const std::vector<double>& norms, Score score) {
    const int users = channels.user_count();
    std::vector<bool> taken(static_cast<std::size_t>(users), false);
    std::vector<int> picks;
    picks.reserve(static_cast<std::size_t>(selected));
    OrthonormalBasis basis(channels.antennas());
    std::vector<double> metric(static_cast<std::size_t>(users), 0.0);

    const int first = argmax_unselected(norms, taken);
    picks.push_back(first);
    taken[static_cast<std::size_t>(first)] = true;
    while (static_cast<int>(picks.size()) < selected) {
        basis.append(channels[static_cast<std::size_t>(picks.back())]);
        for (int k = 0; k < users; ++k) {
            if (!taken[static_cast<std::size_t>(k)]) {
                const double r = basis.residual_squared_norm(channels[static_cast<std::size_t>(k)]);
                metric[static_cast<std::size_t>(k)] = score(r, norms[static_cast<std::size_t>(k)]);
            }
        }
        const int next = argmax_unselected(metric, taken);
        picks.push_back(next);
        taken[static_cast<std::size_t>(next)] = true;
    }
    return picks;
}

} // namespace

SelectionResult select_nus(const ChannelSet& channels, int selected) {
    check_selection_size(channels, selected);
    const auto norms = norms_of(channels);
    std::vector<int> order(static_cast<std::size_t>(channels.user_count()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(selected));

    SelectionResult out;
    out.algorithm = Algorithm::nus;
    out.selection_order = order;
    out.encoding_order = weakest_first(std::move(order), norms);
    return out;
}

SelectionResult select_sus(const ChannelSet& channels, int selected) {
    check_selection_size(channels, selected);
    const auto norms = norms_of(channels);
    SelectionResult out;
    out.algorithm = Algorithm::sus;
    out.selection_order =
        greedy_select(channels, selected, norms, [](double residual, double) { return residual; });
    out.encoding_order = out.selection_order;
    return out;
}

SelectionResult select_aus(const ChannelSet& channels, int selected) {
    check_selection_size(channels, selected);
    const auto norms = norms_of(channels);
    SelectionResult out;
    out.algorithm = Algorithm::aus;
    out.selection_order = greedy_select(channels, selected, norms, [](double residual, double norm) {
        return std::clamp(residual / norm, 0.0, 1.0);
    });
    out.encoding_order = weakest_first(out.selection_order, norms);
    return out;
}

SelectionResult select_rus(const ChannelSet& channels, int selected, Engine& engine) {
    check_selection_size(channels, selected);
    const int users = channels.user_count();
    std::vector<int> pool(static_cast<std::size_t>(users));
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates shuffle.
    for (int i = 0; i < selected; ++i) {
        std::uniform_int_distribution<int> pick(i, users - 1);
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[static_cast<std::size_t>(pick(engine))]);
    }
    pool.resize(static_cast<std::size_t>(selected));

    SelectionResult out;
    out.algorithm = Algorithm::rus;
    out.selection_order = pool;
    out.encoding_order = std::move(pool);
    return out;
}

SelectionResult select_rus(const ChannelSet& channels, int selected, const SeedSpec& seed) {
    Engine engine = make_engine(seed);
    return select_rus(channels, selected, engine);
}

std::uint64_t exhaustive_evaluations(int users, int selected) noexcept {
    if (selected < 0 || users < 0 || selected > users) {
        return 0;
    }
    // K * (K-1) * ... * (K-Ks+1) equals C(K, Ks) * Ks!.
    constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t count = 1;
    for (int i = 0; i < selected; ++i) {
        const auto factor = static_cast<std::uint64_t>(users - i);
        if (count > cap / factor) {
            return cap;
        }
        count *= factor;
    }
    return count;
}

namespace {

class ExhaustiveSearch {
public:
    ExhaustiveSearch(const ChannelSet& channels, int selected, const SinrTargets& targets,
                     PowerModel model)
        : channels_(channels), selected_(selected), targets_(targets), model_(model),
          used_(static_cast<std::size_t>(channels.user_count()), false) {
        prefix_.reserve(static_cast<std::size_t>(selected));
    }

    std::vector<int> run() {
        const auto dim = static_cast<Eigen::Index>(channels_.antennas());
        if (model_ == PowerModel::approx) {
            descend_approx(OrthonormalBasis(channels_.antennas()), 0.0);
        } else {
            descend_exact(Eigen::MatrixXcd::Identity(dim, dim), 0.0);
        }
        if (best_.empty()) {
            throw InfeasibleGeometryError("no feasible encoding order for any subset");
        }
        return best_;
    }

private:
    void record(double total) {
        if (total < best_total_) {
            best_total_ = total;
            best_ = prefix_;
        }
    }

    void descend_approx(const OrthonormalBasis& basis, double partial) {
        const std::size_t depth = prefix_.size();
        const double tol = OrthonormalBasis::kRankTolerance;
        for (int k = 0; k < channels_.user_count(); ++k) {
            if (used_[static_cast<std::size_t>(k)]) {
                continue;
            }
            const ChannelVector& h = channels_[static_cast<std::size_t>(k)];
            const double residual = basis.residual_squared_norm(h);
            if (!(residual > tol * tol * h.squaredNorm())) {
                continue;
            }
            const double total =
                partial + targets_.sigma_sq * targets_.gamma[depth] / residual;
            if (!(total < best_total_)) {
                continue;
            }
            enter(k);
            if (static_cast<int>(depth) + 1 == selected_) {
                record(total);
            } else {
                OrthonormalBasis next = basis;
                next.append(h);
                descend_approx(next, total);
            }
            leave(k);
        }
    }

    // Same recursion as exact_min_power, in the sigma^2 = 1 frame.
    void descend_exact(const Eigen::MatrixXcd& z_inv, double partial) {
        const std::size_t depth = prefix_.size();
        for (int k = 0; k < channels_.user_count(); ++k) {
            if (used_[static_cast<std::size_t>(k)]) {
                continue;
            }
            const ChannelVector& h = channels_[static_cast<std::size_t>(k)];
            const ChannelVector w = z_inv * h;
            const double gain = h.dot(w).real();
            const double p = targets_.gamma[depth] / gain;
            const double total = partial + targets_.sigma_sq * p;
            if (!(total < best_total_)) {
                continue;
            }
            enter(k);
            if (static_cast<int>(depth) + 1 == selected_) {
                record(total);
            } else {
                Eigen::MatrixXcd next = z_inv;
                next.noalias() -= (p / (1.0 + p * gain)) * (w * w.adjoint());
                descend_exact(next, total);
            }
            leave(k);
        }
    }

    void enter(int k) {
        used_[static_cast<std::size_t>(k)] = true;
        prefix_.push_back(k);
    }
    void leave(int k) {
        used_[static_cast<std::size_t>(k)] = false;
        prefix_.pop_back();
    }

    const ChannelSet& channels_;
    int selected_;
    const SinrTargets& targets_;
    PowerModel model_;
    std::vector<bool> used_;
    std::vector<int> prefix_;
    std::vector<int> best_;
    double best_total_ = std::numeric_limits<double>::infinity();
};

} // namespace

SelectionResult select_exhaustive(const ChannelSet& channels, int selected,
                                  const SinrTargets& targets, PowerModel model,
                                  std::uint64_t budget) {
    check_selection_size(channels, selected);
    targets.validate(static_cast<std::size_t>(selected));
    const std::uint64_t work = exhaustive_evaluations(channels.user_count(), selected);
    if (work > budget) {
        throw BudgetError("exhaustive search over K=" + std::to_string(channels.user_count()) +
                          ", Ks=" + std::to_string(selected) + " needs " + std::to_string(work) +
                          " evaluations, budget is " + std::to_string(budget));
    }
    ExhaustiveSearch search(channels, selected, targets, model);
    SelectionResult out;
    out.algorithm = Algorithm::exhaustive;
    out.encoding_order = search.run();
    out.selection_order = out.encoding_order;
    return out;
}

} // namespace dpcpower
