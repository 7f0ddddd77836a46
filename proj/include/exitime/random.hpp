#pragma once

// Counter-based sampling streams. Sample i of a run depends only on the run
// seed and i, so results are identical for any work partition.

#include <array>
#include <cmath>
#include <cstdint>

#include "exitime/errors.hpp"
#include "exitime/geometry.hpp"

namespace exitime {

inline constexpr std::uint64_t kDefaultSeed = 20260418;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
[[nodiscard]] constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic uniform stream keyed by (seed, index, lane).
[[nodiscard]] constexpr double uniform_at(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) noexcept {
    return to_unit(splitmix64(splitmix64(seed ^ 0xD1B54A32D192ED03ull) ^ splitmix64(index * 0x100000001B3ull + lane)));
}

enum class SamplingMode { Stratified, Random };

[[nodiscard]] inline const char* to_string(SamplingMode m) noexcept {
    return m == SamplingMode::Stratified ? "stratified" : "random";
}

/// Uniform sampler over an axis-aligned box. Stratified mode places one
/// jittered point in each cell of an m^N grid (m = round(requested^(1/N))),
/// Random mode draws i.i.d. points.
template <std::size_t N>
class BoxSampler {
public:
    BoxSampler(const AxisBox<N>& box, std::uint64_t requested, SamplingMode mode, std::uint64_t seed)
        : box_(box), mode_(mode), seed_(seed) {
        if (requested == 0) throw InvalidArgument("sample count must be positive");
        for (std::size_t d = 0; d < N; ++d)
            if (!(box.hi[d] > box.lo[d])) throw InvalidArgument("sampling box must have positive extent");
        if (mode == SamplingMode::Stratified) {
            per_axis_ = static_cast<std::uint64_t>(
                std::llround(std::pow(static_cast<double>(requested), 1.0 / static_cast<double>(N))));
            if (per_axis_ == 0) per_axis_ = 1;
            count_ = 1;
            for (std::size_t d = 0; d < N; ++d) count_ *= per_axis_;
        } else {
            count_ = requested;
        }
    }

    [[nodiscard]] std::uint64_t size() const noexcept { return count_; }
    [[nodiscard]] const AxisBox<N>& box() const noexcept { return box_; }
    [[nodiscard]] SamplingMode mode() const noexcept { return mode_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    [[nodiscard]] PhasePoint<N> operator()(std::uint64_t i) const noexcept {
        PhasePoint<N> p;
        if (mode_ == SamplingMode::Random) {
            for (std::size_t d = 0; d < N; ++d)
                p[d] = box_.lo[d] + (box_.hi[d] - box_.lo[d]) * uniform_at(seed_, i, d);
            return p;
        }
        std::uint64_t rest = i;
        for (std::size_t d = 0; d < N; ++d) {
            const std::uint64_t cell = rest % per_axis_;
            rest /= per_axis_;
            const double u = (static_cast<double>(cell) + uniform_at(seed_, i, d)) / static_cast<double>(per_axis_);
            p[d] = box_.lo[d] + (box_.hi[d] - box_.lo[d]) * u;
        }
        return p;
    }

private:
    AxisBox<N> box_;
    SamplingMode mode_;
    std::uint64_t seed_;
    std::uint64_t per_axis_ = 0;
    std::uint64_t count_ = 0;
};

} // namespace exitime
