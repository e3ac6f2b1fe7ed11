// Independent brute-force oracle for the wedge coefficient of N (1,1)-forms:
// expands the product in an explicit exterior algebra over the 2N generators
// dz_1, dzbar_1, ..., dz_N, dzbar_N, tracking signs by inversion counting.
#pragma once

#include "lelong/forms.hpp"

#include <functional>
#include <vector>

namespace lelong::testing {

inline double wedge_oracle(const std::vector<CMatrix>& A) {
    const int N = static_cast<int>(A.size());
    Complex acc(0, 0);
    std::vector<int> word;  // generator ids in multiplication order: e_j = 2j, f_k = 2k+1
    word.reserve(2 * N);
    std::function<void(int, unsigned, unsigned, Complex)> rec = [&](int i, unsigned usedE,
                                                                    unsigned usedF, Complex c) {
        if (i == N) {
            // sign of the word relative to the canonical order e_1 f_1 e_2 f_2 ...
            int inv = 0;
            for (size_t a = 0; a < word.size(); ++a)
                for (size_t b = a + 1; b < word.size(); ++b)
                    if (word[a] > word[b]) ++inv;
            acc += (inv % 2 ? -1.0 : 1.0) * c;
            return;
        }
        for (int j = 0; j < N; ++j) {
            if (usedE & (1u << j)) continue;
            for (int k = 0; k < N; ++k) {
                if (usedF & (1u << k)) continue;
                if (A[i](j, k) == Complex(0, 0)) continue;
                word.push_back(2 * j);
                word.push_back(2 * k + 1);
                rec(i + 1, usedE | (1u << j), usedF | (1u << k), c * A[i](j, k));
                word.pop_back();
                word.pop_back();
            }
        }
    };
    rec(0, 0u, 0u, Complex(1, 0));
    return acc.real();
}

}  // namespace lelong::testing
