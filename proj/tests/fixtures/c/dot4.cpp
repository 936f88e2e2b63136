// 4-element signed dot product with a 32-bit product and 64-bit sum.
// Widening is written with explicit casts since C integer promotion is
// not emulated.
#include <cstdint>

extern "C" int64_t Dot64(const int16_t (&arg_0)[4], const int16_t (&arg_1)[4]) {
    int64_t sum = 0;
    for (int i = 0; i < 4; ++i) {
        int32_t product = (int32_t)arg_0[i] * (int32_t)arg_1[i];
        sum += (int64_t)product;
    }
    return sum;
}
