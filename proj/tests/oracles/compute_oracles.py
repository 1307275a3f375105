"""Independent high-precision reference values frozen into the C++ tests.

Run with: python3 tests/oracles/compute_oracles.py
"""
import mpmath as mp

mp.mp.dps = 40


def rootlog_f(x):
    return mp.quad(lambda s: mp.sqrt(2 * mp.log(1 + s)), [1, x])


def h_b(x, n):
    if x == 0:
        return -mp.sqrt(mp.pi / 2)
    l = mp.log(1 / x)
    return x * mp.sqrt(2 * l) - mp.sqrt(mp.pi / 2) * mp.erf(mp.sqrt(l)) + x * (n - 1) * mp.sqrt(mp.pi / 2)


def splitmix64_bits(seed, n, t):
    mask = (1 << 64) - 1
    gamma = 0x9E3779B97F4A7C15
    bits = []
    for r in range(t):
        for i in range(n):
            counter = r * n + i
            z = (seed + (counter + 1) * gamma) & mask
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
            z = z ^ (z >> 31)
            bits.append(z >> 63)
    return bits


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


show("erf(1)", mp.erf(1))
show("erf(0.3)", mp.erf(mp.mpf("0.3")))
show("erf(2.5)", mp.erf(mp.mpf("2.5")))
show("erfc(5)", mp.erfc(5))
show("normal_tail(1)", mp.erfc(1 / mp.sqrt(2)) / 2)
show("normal_tail(3)", mp.erfc(3 / mp.sqrt(2)) / 2)
show("normal_tail(-2)", mp.erfc(-2 / mp.sqrt(2)) / 2)
show("normal_tail_inverse(0.025)", mp.sqrt(2) * mp.erfinv(1 - 2 * mp.mpf("0.025")))
show("normal_tail_inverse(1e-10)", mp.sqrt(2) * mp.erfinv(1 - 2 * mp.mpf("1e-10")))
for x in ["0.1", "0.5", "1", "2", "5", "10", "30"]:
    x = mp.mpf(x)
    show(f"dawson({x})", mp.sqrt(mp.pi) / 2 * mp.exp(-x * x) * mp.erfi(x))
show("erfi(1)", mp.erfi(1))
show("erfi(2)", mp.erfi(2))
show("integral_1^3 sqrt(2 log(1+s))", rootlog_f(3))
show("rootlog f(3)", rootlog_f(3))
show("rootlog f(0)", rootlog_f(0))
show("rootlog f(100)", rootlog_f(100))
show("rootlog divergence (0.9,0.1) vs uniform2", mp.mpf("0.5") * rootlog_f(mp.mpf("1.8")) + mp.mpf("0.5") * rootlog_f(mp.mpf("0.2")))
show("carl h_B(0.3, N=5)", h_b(mp.mpf("0.3"), 5))
show("abnormal bound T=99 kl=0", 2 * mp.sqrt(100) + mp.sqrt(8 * 99))
show("carl bound T=2 N=2", mp.sqrt(4 * mp.log(2)))
lb = mp.sqrt(mp.mpf(4096) / 2 * (mp.log(16) - 2 * mp.log(2) + 1 / mp.pi)) - mp.sqrt(2 / mp.pi) - 2 * mp.log(64) - mp.log(2)
show("lower bound T=4096 N=64 i=4", lb)
show("normalhedge c for R=(1,0)", 1 / (2 * mp.log(2 * mp.e - 1)))
show("T_1 for delta=0.1 N=2", mp.ceil(8 * mp.log(2) / mp.mpf("0.01")))
print("bernoulli seed=42 N=4 T=4 bits:", "".join(str(b) for b in splitmix64_bits(42, 4, 4)))
