#pragma once

#include <cstdint>
#include <vector>

#include "qcvv/qubit_algebra.hpp"
#include "qcvv/random.hpp"

namespace qcvv {

/// A randomized-benchmarking sequence of Clifford indices whose ideal net
/// product is the identity.
struct RBSequence {
    std::vector<int> gates;
    std::uint64_t seed = 0;  // provenance: seed of the stream that drew it

    std::size_t length() const { return gates.size(); }
};

/// J-1 uniformly random Cliffords followed by the inverting gate (J >= 2).
RBSequence generate_rb_sequence(const CliffordGroup& group, std::size_t J, Rng& rng);

}  // namespace qcvv
