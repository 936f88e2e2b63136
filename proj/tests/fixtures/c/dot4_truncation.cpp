// 4-element Dot64 with the product truncated to 16 bits.
#include <cstdint>

extern "C" int64_t Dot64(const int16_t (&arg_0)[4], const int16_t (&arg_1)[4]) {
    int64_t sum = 0;
    for (int i = 0; i < 4; ++i) {
        int16_t product = arg_0[i] * arg_1[i];
        sum += (int64_t)product;
    }
    return sum;
}
