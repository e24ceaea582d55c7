#pragma once

#include <array>
#include <optional>
#include <vector>

#include "offload/env.hpp"
#include "offload/rng.hpp"

namespace offload {

// One transition as stored for training. When terminal is set the next-state
// fields are unused by target computation.
struct Experience {
    std::vector<double> state_encoding;
    int action = 0;
    double cost = 0.0;
    std::vector<double> next_encoding;
    FeasibleMask next_feasible = {false, false, false};
    bool terminal = false;
};

// Bounded FIFO ring buffer; once full, each push evicts the oldest entry.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience exp);
    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return cap_; }

    // Uniform with replacement. Empty memory yields nullopt (not ready).
    std::optional<std::vector<Experience>> sample(std::size_t batch_size, Rng& rng) const;

    // Entries oldest-first, for inspection.
    const Experience& entry(std::size_t i) const;

private:
    std::size_t cap_;
    std::vector<Experience> buffer_;
    std::size_t cursor_ = 0;  // next write position
    bool full_ = false;
};

}  // namespace offload
