#include "fraglab/bigcomb.hpp"

#include "fraglab/types.hpp"

namespace fraglab {

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt out = 1;
    for (int i = 1; i <= k; ++i) {
        out *= (n - k + i);
        out /= i;  // exact: out is C(n-k+i, i) after each step
    }
    return out;
}

BigInt fibonacci_big(int n) {
    if (n < 1) throw ConfigError("fibonacci_big: n must be >= 1");
    BigInt a = 1, b = 1;
    for (int i = 2; i < n; ++i) {
        BigInt c = a + b;
        a = b;
        b = c;
    }
    return b;
}

double big_to_double(const BigInt& x) { return x.convert_to<double>(); }

}  // namespace fraglab
