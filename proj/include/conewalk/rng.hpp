#ifndef CONEWALK_RNG_HPP
#define CONEWALK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace cw {

// Counter-based substreams: each sample owns a generator keyed by
// (seed, stream index), so results never depend on the thread schedule.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream) {
        state_ = mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
        state_ = mix(state_ ^ (stream * 0xbf58476d1ce4e5b9ULL));
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    double next_double() { // uniform in [0, 1)
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do { u1 = next_double(); } while (u1 <= 0.0);
        u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static uint64_t mix(uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27; z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }
    uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Walker alias table; O(1) draws.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& probs);
    int sample(CounterRng& rng) const;
    size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<int> alias_;
};

} // namespace cw

#endif
