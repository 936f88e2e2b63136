// Two-element signed dot product over 4-bit elements. The product is
// formed at 8 bits and the 4-bit output keeps the low bits of the sum.
#include <cstdint>

extern "C" void dot(const signed _BitInt(4) (&arg_0)[2], const signed _BitInt(4) (&arg_1)[2],
                    signed _BitInt(4) &out_0) {
    signed _BitInt(16) sum = 0;
    for (int i = 0; i < 2; i++) {
        signed _BitInt(8) p = (signed _BitInt(8))arg_0[i] * (signed _BitInt(8))arg_1[i];
        sum += (signed _BitInt(16))p;
    }
    out_0 = (signed _BitInt(4))sum;
}
