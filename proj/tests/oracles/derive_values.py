"""Independent high-precision evaluation of the closed-form reference values
frozen into the C++ test suites. Run with: python3 derive_values.py"""
from itertools import product
from math import comb

import mpmath as mp

mp.mp.dps = 40
e = mp.e


def alpha():
    return (mp.sqrt(e**2 + 4) - e) / (2 * e)


def eta(K, L):
    return (2 * mp.factorial(K + 1) / L) ** (mp.mpf(1) / (K + 1)) / K


def quant(K, L, M):
    return L * K / (2 * mp.mpf(M)) * mp.log(M * eta(K, L))


def stat(N, d):
    return mp.sqrt(2 / mp.mpf(N) * mp.log(2 / mp.mpf(d))) * mp.log(N)


def emp(K, M, N):
    return mp.log(1 + (mp.mpf(M) ** K - 1) / N)


def show(name, v):
    print(f"{name} = {mp.nstr(v, 17)}")


show("alpha", alpha())
for K, L in [(1, 4), (1, 1), (2, 1), (2, 8), (3, 16)]:
    show(f"eta({K},{L})", eta(K, L))
    show(f"min_valid_M({K},{L})", mp.ceil(1 / (alpha() * eta(K, L))))
show("quant(1,4,16)", quant(1, 4, 16))
show("quant(1,1,5)", quant(1, 1, 5))
show("quant(1,1,100)", quant(1, 1, 100))
show("stat(1e4,0.05)", stat(10**4, 0.05))
show("stat(1e6,0.05)", stat(10**6, 0.05))
show("emp(1,100,1e6)", emp(1, 100, 10**6))
show("emp(4,1000,1e6)", emp(4, 1000, 10**6))
tb = quant(1, 1, 100) + stat(10**6, 0.05) + emp(1, 100, 10**6)
show("total(1,1,100,1e6,0.05)", tb)
show("disc bias(3,5)", mp.log(1 + mp.mpf(2) / 5))
show("disc dev(3,5,1)", stat(5, 1))
# vanishing bound, K=1, L=1, M=ceil(sqrt N)
for N in [10**3, 10**4, 10**5, 10**6, 10**7, 10**8]:
    M = int(mp.ceil(mp.sqrt(N)))
    show(f"vanish N={N} M={M}", quant(1, 1, M) + stat(N, 0.05) + emp(1, M, N))

# histogram
show("plugin {2,1}", mp.log(3) - mp.mpf(2) / 3 * mp.log(2))
show("hhat {2,1} M=2", mp.log(3) - mp.mpf(2) / 3 * mp.log(2) - mp.log(2))

# densities
tent_h = mp.mpf(1) / 2 - mp.log(2)
show("tent h (quad)", -mp.quad(lambda t: 4 * t * mp.log(4 * t), [0, 0.5]) * 2)
show("tent h", tent_h)


def hb(x):
    return -x * mp.log(x) - (1 - x) * mp.log(1 - x)


show("mix eps=5e-4", hb(mp.mpf(5e-4)) + (1 - mp.mpf(5e-4)) * tent_h + mp.mpf(5e-4) * (-20))
show("s for K=1,h=-2", mp.exp(-2 - tent_h))
show("q level a=2,k=1", mp.exp(-2 - e**2))
show("collision exact M=1e6 N=1e3",
     1 - mp.exp(sum(mp.log(1 - mp.mpf(i) / 10**6) for i in range(1000))))
show("collision bound M=1e6 N=1e3", 1 - ((mp.mpf(10**6) - 1000 + 1) / 10**6) ** 1000)
show("trapezoid c=1 (quad)",
     -2 * mp.quad(lambda t: t * mp.log(t), [0, 1]))

# oracle
show("H(.5,.3,.2)", -sum(p * mp.log(p) for p in map(mp.mpf, ["0.5", "0.3", "0.2"])))


def expected_plugin(pmf, N):
    pmf = [mp.mpf(p) for p in pmf]
    m = len(pmf)
    total = mp.mpf(0)
    for counts in product(range(N + 1), repeat=m):
        if sum(counts) != N:
            continue
        prob = mp.factorial(N)
        for c, p in zip(counts, pmf):
            prob *= p**c / mp.factorial(c)
        H = -sum(mp.mpf(c) / N * mp.log(mp.mpf(c) / N) for c in counts if c)
        total += prob * H
    return total


show("E[H] (.5,.5) N=2", expected_plugin(["0.5", "0.5"], 2))
v = expected_plugin(["0.5", "0.3", "0.2"], 5)
show("E[H] (.5,.3,.2) N=5", v)
show("xlogx x=0,y=0.1", mp.mpf("0.1") * mp.log(10))
show("continuity rhs M=32", mp.mpf("0.0625") * mp.log(32))
for a in [1, 2, 5]:
    for k in ["0.1", "1", "3"]:
        k = mp.mpf(k)
        b = k * mp.exp(a)
        pa, qa = mp.exp(-a), mp.exp(-a - b)
        D = pa * mp.log(pa / qa) + (1 - pa) * mp.log((1 - pa) / (1 - qa))
        show(f"D({a},{mp.nstr(k,3)})", D)
show("kl a for N=100 d=0.1", mp.log(4000))
