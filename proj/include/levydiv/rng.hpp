/*
   Copyright 2026 the levydiv authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>

namespace levydiv {

/// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
/// The 128-bit counter is split: words 0-1 advance per block, words 2-3 hold
/// the stream id, so (key, stream) pairs index independent substreams of
/// length 2^66. Sequential consumption only; no shared state.
class Philox4x32 {
public:
    Philox4x32(std::uint64_t key, std::uint64_t stream) {
        key_[0] = static_cast<std::uint32_t>(key);
        key_[1] = static_cast<std::uint32_t>(key >> 32);
        ctr_[0] = 0;
        ctr_[1] = 0;
        ctr_[2] = static_cast<std::uint32_t>(stream);
        ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
        idx_ = 4;
    }

    std::uint32_t next32() {
        if (idx_ == 4) fill_block();
        return out_[idx_++];
    }

    std::uint64_t next64() {
        std::uint64_t hi = next32();
        return (hi << 32) | next32();
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                        std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void fill_block() {
        std::uint32_t x0 = ctr_[0], x1 = ctr_[1], x2 = ctr_[2], x3 = ctr_[3];
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(kM0, x0, hi0, lo0);
            mulhilo(kM1, x2, hi1, lo1);
            std::uint32_t y0 = hi1 ^ x1 ^ k0;
            std::uint32_t y1 = lo1;
            std::uint32_t y2 = hi0 ^ x3 ^ k1;
            std::uint32_t y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += kW0;
            k1 += kW1;
        }
        out_[0] = x0;
        out_[1] = x1;
        out_[2] = x2;
        out_[3] = x3;
        if (++ctr_[0] == 0) ++ctr_[1]; // 64-bit block counter
        idx_ = 0;
    }

    std::uint32_t key_[2];
    std::uint32_t ctr_[4];
    std::uint32_t out_[4];
    int idx_;
};

/// Per-path random source: one Philox substream keyed by (seed, path index),
/// with explicit samplers so the variate consumption order is fixed by this
/// code alone.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream)
        : eng_(seed, stream), has_cached_normal_(false), cached_normal_(0.0) {}

    /// Uniform on the open interval (0,1).
    double uniform() {
        return (double(eng_.next64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the Marsaglia polar method (pairs cached).
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double v1, v2, s;
        do {
            v1 = 2.0 * uniform() - 1.0;
            v2 = 2.0 * uniform() - 1.0;
            s = v1 * v1 + v2 * v2;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_normal_ = v2 * f;
        has_cached_normal_ = true;
        return v1 * f;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    Philox4x32 eng_;
    bool has_cached_normal_;
    double cached_normal_;
};

} // namespace levydiv
