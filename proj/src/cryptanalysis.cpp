#include "taptrace/cryptanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "taptrace/rng.hpp"
#include "taptrace/text.hpp"

namespace taptrace {

std::string filter_corpus(std::string_view raw,
                          const std::vector<std::string>& alphabet) {
    std::set<char> keep;
    for (const std::string& label : alphabet) {
        if (label.size() == 1) keep.insert(label[0]);
    }
    std::string lowered = to_lower(raw);
    std::string out;
    out.reserve(lowered.size());
    for (char c : lowered) {
        if (keep.count(c)) out.push_back(c);
    }
    return out;
}

namespace {

std::map<char, std::size_t> symbol_index_of(
    const std::vector<std::string>& alphabet) {
    std::map<char, std::size_t> index;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        if (alphabet[i].size() != 1) {
            throw std::runtime_error(
                "frequency analysis needs single-character labels, got '" +
                alphabet[i] + "'");
        }
        if (!index.emplace(alphabet[i][0], i).second) {
            throw std::runtime_error("duplicate alphabet symbol '" + alphabet[i] +
                                     "'");
        }
    }
    return index;
}

}  // namespace

FrequencyTable build_frequency_table(std::string_view filtered,
                                     const std::vector<std::string>& alphabet,
                                     std::string source) {
    const auto index = symbol_index_of(alphabet);
    std::vector<double> counts(alphabet.size(), 0.0);
    double total = 0.0;
    for (char c : filtered) {
        const auto it = index.find(c);
        if (it == index.end()) {
            throw std::runtime_error("corpus symbol '" + std::string(1, c) +
                                     "' absent from alphabet");
        }
        counts[it->second] += 1.0;
        total += 1.0;
    }
    if (total <= 0.0) {
        throw std::runtime_error("frequency table: empty corpus");
    }
    FrequencyTable table;
    table.symbols = alphabet;
    table.freq.resize(alphabet.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        table.freq[i] = counts[i] / total;
    }
    table.source = std::move(source);
    return table;
}

BigramModel build_bigram_model(std::string_view filtered,
                               const std::vector<std::string>& alphabet) {
    const auto index = symbol_index_of(alphabet);
    const std::size_t n = alphabet.size();
    std::vector<double> counts(n * n, 1.0);  // add-one smoothing
    for (std::size_t i = 0; i + 1 < filtered.size(); ++i) {
        const std::size_t a = index.at(filtered[i]);
        const std::size_t b = index.at(filtered[i + 1]);
        counts[a * n + b] += 1.0;
    }
    BigramModel model;
    model.symbols = alphabet;
    model.log_prob.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        double row_total = 0.0;
        for (std::size_t b = 0; b < n; ++b) row_total += counts[a * n + b];
        for (std::size_t b = 0; b < n; ++b) {
            model.log_prob[a * n + b] = std::log(counts[a * n + b] / row_total);
        }
    }
    return model;
}

std::vector<std::size_t> slot_frequencies(const SlotObservationLog& log,
                                          std::size_t epoch) {
    if (log.entries.empty()) {
        throw std::runtime_error("slot_frequencies: empty observation log");
    }
    std::size_t max_epoch = 0;
    for (const SlotObservation& obs : log.entries) {
        max_epoch = std::max(max_epoch, obs.epoch);
    }
    if (epoch > max_epoch) {
        throw std::runtime_error("epoch " + std::to_string(epoch) +
                                 " not present in observation log");
    }
    std::vector<std::size_t> counts(log.n_slots, 0);
    for (const SlotObservation& obs : log.entries) {
        if (obs.slot >= log.n_slots) {
            throw std::runtime_error("slot observation out of range");
        }
        if (obs.epoch == epoch) ++counts[obs.slot];
    }
    return counts;
}

SubstitutionMap rank_match(const std::vector<std::size_t>& counts,
                           const std::vector<std::string>& base_labels,
                           const FrequencyTable& table) {
    const std::size_t n = base_labels.size();
    if (counts.size() != n || table.symbols.size() != n) {
        throw std::invalid_argument("rank_match: size mismatch");
    }
    if (n == 0) throw std::invalid_argument("rank_match: empty counts");
    std::vector<std::size_t> slot_order(n);
    std::iota(slot_order.begin(), slot_order.end(), 0);
    std::stable_sort(slot_order.begin(), slot_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return counts[a] > counts[b];
                     });
    std::vector<std::size_t> symbol_order(n);
    std::iota(symbol_order.begin(), symbol_order.end(), 0);
    std::stable_sort(symbol_order.begin(), symbol_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return table.freq[a] > table.freq[b];
                     });
    SubstitutionMap map;
    for (std::size_t r = 0; r < n; ++r) {
        map.mapping[base_labels[slot_order[r]]] = table.symbols[symbol_order[r]];
    }
    return map;
}

namespace {

// Slot-level bigram counts of one epoch, stored per slot for O(degree)
// transposition deltas.
struct EpochBigrams {
    struct Edge {
        std::size_t other;
        double count;
    };
    std::vector<std::vector<Edge>> out;  // edges slot -> other
    std::vector<std::vector<Edge>> in;   // edges other -> slot

    explicit EpochBigrams(std::size_t n_slots,
                          const std::vector<std::size_t>& sequence)
        : out(n_slots), in(n_slots) {
        std::map<std::pair<std::size_t, std::size_t>, double> counts;
        for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
            counts[{sequence[i], sequence[i + 1]}] += 1.0;
        }
        for (const auto& [pair, count] : counts) {
            out[pair.first].push_back({pair.second, count});
            in[pair.second].push_back({pair.first, count});
        }
    }
};

double full_score(const EpochBigrams& bigrams,
                  const std::vector<std::size_t>& assign,
                  const std::vector<double>& log_prob, std::size_t n) {
    double score = 0.0;
    for (std::size_t s = 0; s < bigrams.out.size(); ++s) {
        for (const auto& edge : bigrams.out[s]) {
            score += edge.count * log_prob[assign[s] * n + assign[edge.other]];
        }
    }
    return score;
}

// Log-likelihood contribution of all bigram edges touching slot a or b.
double touching_score(const EpochBigrams& bigrams,
                      const std::vector<std::size_t>& assign,
                      const std::vector<double>& log_prob, std::size_t n,
                      std::size_t a, std::size_t b) {
    double score = 0.0;
    for (std::size_t s : {a, b}) {
        for (const auto& edge : bigrams.out[s]) {
            score += edge.count * log_prob[assign[s] * n + assign[edge.other]];
        }
        for (const auto& edge : bigrams.in[s]) {
            if (edge.other == a || edge.other == b) continue;  // counted above
            score += edge.count * log_prob[assign[edge.other] * n + assign[s]];
        }
    }
    return score;
}

// Sweeps all transpositions until a full pass yields no strict improvement
// or the proposal budget runs out. Returns the final score.
double hill_climb(const EpochBigrams& bigrams, std::vector<std::size_t>& assign,
                  const std::vector<double>& log_prob, std::size_t n,
                  int max_proposals) {
    double score = full_score(bigrams, assign, log_prob, n);
    int proposals = 0;
    bool improved = true;
    while (improved && proposals < max_proposals) {
        improved = false;
        for (std::size_t a = 0; a + 1 < n && proposals < max_proposals; ++a) {
            for (std::size_t b = a + 1; b < n && proposals < max_proposals; ++b) {
                ++proposals;
                const double before = touching_score(bigrams, assign, log_prob, n, a, b);
                std::swap(assign[a], assign[b]);
                const double after = touching_score(bigrams, assign, log_prob, n, a, b);
                if (after > before + 1e-12) {
                    score += after - before;
                    improved = true;
                } else {
                    std::swap(assign[a], assign[b]);
                }
            }
        }
    }
    return score;
}

}  // namespace

double sequence_log_likelihood(const std::vector<std::size_t>& slot_sequence,
                               const std::vector<std::string>& base_labels,
                               const SubstitutionMap& mapping,
                               const BigramModel& bigrams) {
    const std::size_t n = base_labels.size();
    for (std::size_t slot : slot_sequence) {
        if (slot >= n) {
            throw std::invalid_argument("sequence_log_likelihood: slot out of range");
        }
    }
    std::map<std::string, std::size_t> symbol_index;
    for (std::size_t i = 0; i < bigrams.symbols.size(); ++i) {
        symbol_index[bigrams.symbols[i]] = i;
    }
    std::vector<std::size_t> assign(n);
    for (std::size_t s = 0; s < n; ++s) {
        assign[s] = symbol_index.at(mapping.at(base_labels[s]));
    }
    const EpochBigrams edges(n, slot_sequence);
    return full_score(edges, assign, bigrams.log_prob, n);
}

RecoveryResult recover_mapping(const std::vector<std::size_t>& slot_sequence,
                               const std::vector<std::string>& base_labels,
                               const FrequencyTable& table,
                               const BigramModel& bigram_model,
                               const RecoveryParams& params,
                               std::uint64_t seed) {
    const std::size_t n = base_labels.size();
    if (n == 0) throw std::invalid_argument("recover_mapping: empty layout");
    if (slot_sequence.empty()) {
        throw std::invalid_argument("recover_mapping: empty observation sequence");
    }
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t slot : slot_sequence) {
        if (slot >= n) throw std::invalid_argument("recover_mapping: slot out of range");
        ++counts[slot];
    }

    std::map<std::string, std::size_t> symbol_index;
    for (std::size_t i = 0; i < table.symbols.size(); ++i) {
        symbol_index[table.symbols[i]] = i;
    }

    const EpochBigrams bigrams(n, slot_sequence);

    // Start 0: rank matching. Further starts: seeded random permutations.
    const SubstitutionMap ranked = rank_match(counts, base_labels, table);
    std::vector<std::size_t> best_assign(n);
    for (std::size_t s = 0; s < n; ++s) {
        best_assign[s] = symbol_index.at(ranked.at(base_labels[s]));
    }
    double best_score = hill_climb(bigrams, best_assign, bigram_model.log_prob, n,
                                   params.max_proposals);

    Rng rng(seed);
    for (int restart = 1; restart < params.restarts; ++restart) {
        std::vector<std::size_t> assign(n);
        std::iota(assign.begin(), assign.end(), 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            std::swap(assign[i], assign[rng.uniform_index(i, n - 1)]);
        }
        const double score = hill_climb(bigrams, assign, bigram_model.log_prob, n,
                                        params.max_proposals);
        if (score > best_score + 1e-12) {
            best_score = score;
            best_assign = assign;
        }
    }

    RecoveryResult result;
    result.log_likelihood = best_score;
    for (std::size_t s = 0; s < n; ++s) {
        result.mapping.mapping[base_labels[s]] = table.symbols[best_assign[s]];
    }
    return result;
}

ReshuffleOutcome evaluate_reshuffle_tradeoff(std::string_view corpus_raw,
                                             const KeyboardLayout& base,
                                             std::size_t reshuffle_every_n,
                                             std::uint64_t seed,
                                             const RecoveryParams& params) {
    if (reshuffle_every_n < 1) {
        throw std::invalid_argument("evaluate_reshuffle_tradeoff: n must be >= 1");
    }
    const std::vector<std::string> alphabet = base.labels();
    const std::string filtered = filter_corpus(corpus_raw, alphabet);
    if (filtered.empty()) {
        throw std::runtime_error(
            "evaluate_reshuffle_tradeoff: corpus shares no symbols with the layout");
    }
    const FrequencyTable table =
        build_frequency_table(filtered, alphabet, "corpus");
    const BigramModel bigrams = build_bigram_model(filtered, alphabet);

    const std::size_t n_epochs =
        (filtered.size() + reshuffle_every_n - 1) / reshuffle_every_n;
    ReshuffleOutcome outcome;
    outcome.reshuffle_every = reshuffle_every_n;
    outcome.seed = seed;
    double recovery_sum = 0.0;
    double loglik_sum = 0.0;
    for (std::size_t epoch = 0; epoch < n_epochs; ++epoch) {
        Rng popup_rng = Rng::for_stream(seed, epoch);
        const KeyboardLayout shuffled = shuffle_layout(base, popup_rng);
        const SubstitutionMap truth = substitution_map(base, shuffled);

        std::map<char, std::size_t> slot_of_char;
        for (std::size_t slot = 0; slot < shuffled.key_count(); ++slot) {
            const std::string& label = shuffled.key_at_slot(slot).label;
            if (label.size() == 1) slot_of_char[label[0]] = slot;
        }
        const std::size_t begin = epoch * reshuffle_every_n;
        const std::size_t end =
            std::min(filtered.size(), begin + reshuffle_every_n);
        std::vector<std::size_t> sequence;
        sequence.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            const auto it = slot_of_char.find(filtered[i]);
            if (it == slot_of_char.end()) {
                throw std::runtime_error("corpus symbol '" +
                                         std::string(1, filtered[i]) +
                                         "' absent from layout");
            }
            sequence.push_back(it->second);
        }

        const RecoveryResult recovered =
            recover_mapping(sequence, alphabet, table, bigrams, params,
                            derive_seed(seed, 0x1000000 + epoch));
        std::size_t correct = 0;
        for (const std::string& label : alphabet) {
            if (recovered.mapping.at(label) == truth.at(label)) ++correct;
        }
        const double recovery =
            static_cast<double>(correct) / static_cast<double>(alphabet.size());
        outcome.per_epoch_recovery.push_back(recovery);
        recovery_sum += recovery;
        loglik_sum += recovered.log_likelihood;
    }
    outcome.mean_recovery = recovery_sum / static_cast<double>(n_epochs);
    outcome.mean_log_likelihood = loglik_sum / static_cast<double>(n_epochs);
    return outcome;
}

}  // namespace taptrace
