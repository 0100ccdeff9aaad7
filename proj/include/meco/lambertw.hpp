#pragma once

namespace meco {

// Principal branch W0 of the Lambert W function: w e^w = x, w >= -1.
// Arguments below -1/e by at most 1e-12 are treated as the branch point;
// anything further below throws DomainError.
double lambert_w0(double x);

// 1 + W0((p - 1)/e) for p >= 0, accurate near the branch point (p -> 0) where
// the direct form loses all significant digits. Equivalently the root q >= 0
// of (q - 1) e^q + 1 = p.
double lambert_w0_shifted(double p);

// Rate minimising (1/gain) f(r)/r + price/r per bit, i.e. the solution of
// f(r) - r f'(r) = -price * gain with f(r) = noise (2^{r/W} - 1):
//   r = W/ln2 [W0((price gain/noise - 1)/e) + 1].
// Zero price gives rate zero.
double rate_from_dual(double price, double gain, double noise, double bandwidth);

// Inverse of y = f(x) - x f'(x) on x > 0 (y < 0):
//   x = W/ln2 [W0(-y/(e N0) - 1/e) + 1].
double invert_power_tradeoff(double y, double noise, double bandwidth);

}  // namespace meco
