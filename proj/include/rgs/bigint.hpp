#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rgs {

// Minimal arbitrary-precision unsigned integer: enough for exact pool
// cardinalities (products of axis counts can exceed 10^25).
class BigUint {
public:
    BigUint() : limbs_{0} {}
    explicit BigUint(std::uint64_t v) {
        limbs_.clear();
        while (v > 0) {
            limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
            v /= kBase;
        }
        if (limbs_.empty()) limbs_.push_back(0);
    }

    BigUint& mul(std::uint64_t m) {
        std::uint64_t carry = 0;
        for (auto& limb : limbs_) {
            const std::uint64_t cur = static_cast<std::uint64_t>(limb) * m + carry;
            limb = static_cast<std::uint32_t>(cur % kBase);
            carry = cur / kBase;
        }
        while (carry > 0) {
            limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
            carry /= kBase;
        }
        return *this;
    }

    bool is_zero() const { return limbs_.size() == 1 && limbs_[0] == 0; }

    // *this < v
    bool less_than(std::uint64_t v) const {
        BigUint rhs(v);
        if (limbs_.size() != rhs.limbs_.size()) return limbs_.size() < rhs.limbs_.size();
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            if (limbs_[i] != rhs.limbs_[i]) return limbs_[i] < rhs.limbs_[i];
        }
        return false;
    }

    std::string str() const {
        std::string out = std::to_string(limbs_.back());
        for (std::size_t i = limbs_.size() - 1; i-- > 0;) {
            std::string part = std::to_string(limbs_[i]);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

    // Number of decimal digits; convenient for magnitude assertions.
    std::size_t digits() const { return str().size(); }

private:
    static constexpr std::uint64_t kBase = 1000000000ULL; // 1e9 per limb
    std::vector<std::uint32_t> limbs_;                    // little-endian
};

} // namespace rgs
