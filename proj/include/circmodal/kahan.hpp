#pragma once

namespace circmodal {

/// Compensated (Kahan) accumulator for the density sums.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double term) {
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

}  // namespace circmodal
