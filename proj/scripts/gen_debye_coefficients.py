"""Emit the polynomial coefficients u_k(p) of the uniform asymptotic (Debye)
expansion of the modified Bessel function I_nu as C++ constants."""
from fractions import Fraction as F

K_MAX = 12


def deriv(c):
    return [i * c[i] for i in range(1, len(c))] or [F(0)]


def mul(a, b):
    r = [F(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            r[i + j] += x * y
    return r


def add(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def integrate(c):
    return [F(0)] + [c[i] / (i + 1) for i in range(len(c))]


u = [[F(1)]]
for k in range(K_MAX):
    prev = u[-1]
    t1 = mul([F(0), F(0), F(1, 2), F(0), F(-1, 2)], deriv(prev))
    t2 = [x / 8 for x in integrate(mul([F(1), F(0), F(-5)], prev))]
    u.append(add(t1, t2))

print("// Generated by scripts/gen_debye_coefficients.py; do not edit.")
print("// u_k(p) = sum_i c[k][i] * p^(k + 2 i), i = 0..k")
print(f"inline constexpr int kDebyeTerms = {K_MAX + 1};")
print(f"inline constexpr double kDebyeCoefficients[{K_MAX + 1}][{K_MAX + 1}] = {{")
for k, c in enumerate(u):
    vals = [c[k + 2 * i] if k + 2 * i < len(c) else F(0) for i in range(K_MAX + 1)]
    # sanity: all other coefficients vanish
    for j, x in enumerate(c):
        if x != 0:
            assert j >= k and (j - k) % 2 == 0
    print("    {" + ", ".join(repr(float(v)) for v in vals) + "},")
print("};")
