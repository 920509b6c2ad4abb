#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace fraglab {

using BigInt = boost::multiprecision::cpp_int;

// C(n, k) exactly; 0 for k < 0 or k > n.
BigInt binomial(int n, int k);

// F_1 = F_2 = 1.
BigInt fibonacci_big(int n);

double big_to_double(const BigInt& x);

}  // namespace fraglab
