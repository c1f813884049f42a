"""Reference values of exp(-z) I_nu(z) at 30 digits (mpmath), frozen into
tests/bessel_reference.inc for the scaled Bessel unit test."""
import mpmath as mp

mp.mp.dps = 40
nus = ["0", "0.5", "2/3", "1", "4/3", "2", "5.5", "12", "16", "16.5", "20",
       "40", "100", "333.25", "1200"]
zs = ["1e-3", "0.5", "1", "5", "10", "29.9", "30.1", "50", "100", "500",
      "2000", "1e4", "2e5"]
print("// Generated by scripts/gen_bessel_reference.py (mpmath); do not edit.")
print("// {nu, z, exp(-z) I_nu(z)}")
print("inline constexpr double kBesselReference[][3] = {")
for n in nus:
    nu = mp.mpf(mp.fraction(*map(int, n.split("/")))) if "/" in n else mp.mpf(n)
    for zs_ in zs:
        z = mp.mpf(zs_)
        v = mp.besseli(nu, z) * mp.exp(-z)
        if v < mp.mpf("1e-280"):
            continue
        print(f"    {{{mp.nstr(nu, 20)}, {mp.nstr(z, 20)}, {mp.nstr(v, 20)}}},")
print("};")
