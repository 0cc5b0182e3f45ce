#include "qcvv/rb_sequence.hpp"

#include <stdexcept>

namespace qcvv {

RBSequence generate_rb_sequence(const CliffordGroup& group, std::size_t J, Rng& rng) {
    if (J < 2) throw std::invalid_argument("an RB sequence needs J >= 2");
    RBSequence s;
    s.gates.reserve(J);
    for (std::size_t l = 0; l + 1 < J; ++l) {
        s.gates.push_back(static_cast<int>(rng.uniform_index(CliffordGroup::kSize)));
    }
    s.gates.push_back(group.inverse_of_product(s.gates));
    return s;
}

}  // namespace qcvv
