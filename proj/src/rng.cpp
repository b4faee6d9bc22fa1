#include "conewalk/rng.hpp"

#include <stdexcept>

namespace cw {

AliasTable::AliasTable(const std::vector<double>& probs) {
    const size_t n = probs.size();
    if (n == 0) throw std::invalid_argument("empty probability vector");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    double total = 0.0;
    for (double p : probs) total += p;
    for (size_t i = 0; i < n; ++i) scaled[i] = probs[i] * double(n) / total;

    std::vector<int> small, large;
    for (size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back(int(i));
    while (!small.empty() && !large.empty()) {
        int s = small.back(); small.pop_back();
        int l = large.back(); large.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (int i : large) prob_[i] = 1.0;
    for (int i : small) prob_[i] = 1.0;
}

int AliasTable::sample(CounterRng& rng) const {
    const size_t i = size_t(rng.next_u64() % prob_.size());
    return rng.next_double() < prob_[i] ? int(i) : alias_[i];
}

} // namespace cw
