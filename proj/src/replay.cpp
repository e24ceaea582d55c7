#include "offload/replay.hpp"

#include <stdexcept>

namespace offload {

ReplayMemory::ReplayMemory(std::size_t capacity) : cap_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayMemory: capacity must be >= 1");
    buffer_.reserve(capacity);
}

void ReplayMemory::push(Experience exp) {
    if (buffer_.size() < cap_) {
        buffer_.push_back(std::move(exp));
        cursor_ = buffer_.size() % cap_;
        full_ = buffer_.size() == cap_;
    } else {
        buffer_[cursor_] = std::move(exp);
        cursor_ = (cursor_ + 1) % cap_;
    }
}

std::optional<std::vector<Experience>> ReplayMemory::sample(std::size_t batch_size, Rng& rng) const {
    if (size() == 0) return std::nullopt;
    std::vector<Experience> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i)
        out.push_back(buffer_[static_cast<std::size_t>(rng.uniform_int(size()))]);
    return out;
}

const Experience& ReplayMemory::entry(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("ReplayMemory::entry");
    if (!full_) return buffer_[i];
    return buffer_[(cursor_ + i) % cap_];
}

}  // namespace offload
