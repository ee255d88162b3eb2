#ifndef BNSV_NUMERIC_HPP
#define BNSV_NUMERIC_HPP

#include <cmath>

namespace bnsv {

// Neumaier compensated accumulator; summation order stays the caller's
// responsibility (fixed orders keep results independent of worker count).
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double term) {
        const double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace bnsv

#endif
