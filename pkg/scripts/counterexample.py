"""Renyi 2-cut versus full Renyi on the three-point pair, over a few (alpha, beta).

    python3 scripts/counterexample.py
"""

from divkit import DivergenceSpec, k_cut, renyi
from divkit.kcut import counterexample_bound, counterexample_pair

CASES = [(2.0, 4.0), (2.0, 6.0), (3.0, 5.0), (1.5, 3.0), (8.0, 12.0)]


def main():
    print(f"{'alpha':>6} {'beta':>6} {'renyi':>12} {'2-cut':>12} {'gap':>12} {'bound':>12}  witness")
    for alpha, beta in CASES:
        mu1, mu2 = counterexample_pair(alpha, beta)
        full = renyi(alpha, mu1, mu2)
        cut = k_cut(DivergenceSpec.renyi(alpha), 2, mu1, mu2)
        bound = counterexample_bound(alpha, beta)
        print(f"{alpha:6.2f} {beta:6.2f} {full:12.7f} {cut.value:12.7f} {cut.gap:12.7f} {bound:12.7f}  "
              f"{cut.witness.blocks()}")


if __name__ == "__main__":
    main()
